#include "visualmetrics/distortion_analysis.hpp"

#include "visualmetrics/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace visualmetrics {

std::string DistortionReport::to_json() const {
    nlohmann::ordered_json j;
    j["focal"] = focal;
    j["radii"] = radii;
    j["sup_ratio"] = sup_ratio;
    j["inf_ratio"] = inf_ratio;
    j["L"] = L;
    j["l"] = l;
    j["H_star"] = H_star;
    j["bracket"] = {bracket[0], bracket[1]};
    return j.dump();
}

namespace {

// Least-squares line through (x_i, y_i), evaluated at 0.
double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return sy / n;
    const double slope = (n * sxy - sx * sy) / den;
    return (sy - slope * sx) / n;
}

}  // namespace

DistortionReport pointwise_distortion(const SampledMap& M, const RadiusSchedule& schedule) {
    if (M.focal >= M.size) throw Error(ErrorCode::InvalidArgument, "focal point not in the sample");
    if (schedule.annuli < 2) throw Error(ErrorCode::InvalidArgument, "need at least two annuli");
    std::vector<double> dx(M.size), dy(M.size);
    std::vector<double> positive;
    for (std::size_t i = 0; i < M.size; ++i) {
        if (i == M.focal) continue;
        dx[i] = M.source_distance(M.focal, i);
        dy[i] = M.image_distance(M.focal, i);
        if (dx[i] > 0.0) positive.push_back(dx[i]);
    }
    double r0 = schedule.r0;
    if (r0 <= 0.0) {
        if (positive.empty()) throw Error(ErrorCode::InsufficientSamples, "no sample points off the focal point", 0);
        const std::size_t k = positive.size() / 10;
        std::nth_element(positive.begin(), positive.begin() + k, positive.end());
        r0 = positive[k];
    }
    const int J = schedule.annuli;
    DistortionReport R;
    R.focal = M.focal_coords;
    R.image_focal = M.image_focal_coords;
    for (int j = 0; j <= J; ++j) R.radii.push_back(std::ldexp(r0, -j));
    R.sup_ratio.assign(J, 0.0);
    R.inf_ratio.assign(J, std::numeric_limits<double>::infinity());
    R.counts.assign(J, 0);
    for (std::size_t i = 0; i < M.size; ++i) {
        if (i == M.focal || !(dx[i] > 0.0)) continue;
        if (dx[i] > R.radii[0] || dx[i] < R.radii[J]) continue;
        const int j = std::min(J - 1, static_cast<int>(std::floor(std::log2(R.radii[0] / dx[i]))));
        const double ratio = dy[i] / dx[i];
        R.sup_ratio[j] = std::max(R.sup_ratio[j], ratio);
        R.inf_ratio[j] = std::min(R.inf_ratio[j], ratio);
        ++R.counts[j];
    }
    for (int j = 0; j < J; ++j)
        if (R.counts[j] < schedule.n_min)
            throw Error(ErrorCode::InsufficientSamples,
                        "annulus " + std::to_string(j) + " holds " + std::to_string(R.counts[j]) + " points", j);

    std::vector<double> r, su, in;
    for (int j = J - 3; j < J; ++j) {
        r.push_back(R.radii[j]);
        su.push_back(R.sup_ratio[j]);
        in.push_back(R.inf_ratio[j]);
    }
    R.L = extrapolate_to_zero(r, su);
    R.l = extrapolate_to_zero(r, in);
    if (!(R.l > 0.0) || R.L < R.l) {
        R.L = R.sup_ratio[J - 1];
        R.l = R.inf_ratio[J - 1];
    }
    R.H_star = R.L / R.l;
    const double HJ = R.sup_ratio[J - 1] / R.inf_ratio[J - 1];
    const double HJm = R.sup_ratio[J - 2] / R.inf_ratio[J - 2];
    const double e = std::abs(HJ - HJm);
    R.bracket[0] = std::min(R.H_star, HJ) - e;
    R.bracket[1] = std::max(R.H_star, HJ) + e;
    return R;
}

ChainResult chain_distortion_bound(const std::vector<DistortionReport>& chain, const DistortionReport* composite, double tol) {
    if (chain.empty()) throw Error(ErrorCode::InvalidArgument, "empty chain");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const auto& a = chain[i].image_focal;
        const auto& b = chain[i + 1].focal;
        bool ok = a.size() == b.size();
        for (std::size_t k = 0; ok && k < a.size(); ++k) ok = std::abs(a[k] - b[k]) <= 1e-9;
        if (!ok) throw Error(ErrorCode::NotComposable, "factor " + std::to_string(i) + " does not feed the next",
                             static_cast<long>(i));
    }
    ChainResult out;
    for (const auto& r : chain) out.product *= r.H_star;
    if (composite) {
        out.measured = composite->H_star;
        out.holds = out.measured <= out.product + tol;
    }
    return out;
}

double bilipschitz_audit(const std::vector<std::pair<double, double>>& pairs, std::size_t min_pairs) {
    std::size_t used = 0;
    double L = 1.0;
    for (const auto& [dx, dy] : pairs) {
        if (!(dx > 0.0) || !(dy > 0.0)) continue;
        L = std::max({L, dy / dx, dx / dy});
        ++used;
    }
    if (used < min_pairs)
        throw Error(ErrorCode::InsufficientSamples, "only " + std::to_string(used) + " usable pairs");
    return L;
}

}  // namespace visualmetrics
