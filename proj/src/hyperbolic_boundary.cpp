#include "visualmetrics/hyperbolic_boundary.hpp"

#include "visualmetrics/invariant_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace visualmetrics {

FiniteMetricSample::FiniteMetricSample(Eigen::MatrixXd d, int base, std::vector<std::string> labels)
    : d_(std::move(d)), base_(base), labels_(std::move(labels)) {
    const int n = static_cast<int>(d_.rows());
    if (d_.cols() != n) throw Error(ErrorCode::InvalidArgument, "distance matrix must be square");
    if (base_ >= n) throw Error(ErrorCode::InvalidArgument, "base index out of range");
    if (!labels_.empty() && static_cast<int>(labels_.size()) != n)
        throw Error(ErrorCode::InvalidArgument, "label count does not match the matrix");
    for (int i = 0; i < n; ++i) {
        if (d_(i, i) != 0.0) throw Error(ErrorCode::InvalidArgument, "nonzero diagonal entry");
        for (int j = i + 1; j < n; ++j) {
            if (d_(i, j) != d_(j, i)) throw Error(ErrorCode::InvalidArgument, "distance matrix is not symmetric");
            if (!(d_(i, j) >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative distance");
        }
    }
    if (n <= 400) {
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z) slack_ = std::max(slack_, d_(x, z) - d_(x, y) - d_(y, z));
    } else {
        std::mt19937_64 rng(0x5eed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int t = 0; t < 20000000; ++t) {
            const int x = pick(rng), y = pick(rng), z = pick(rng);
            slack_ = std::max(slack_, d_(x, z) - d_(x, y) - d_(y, z));
        }
    }
}

FiniteMetricSample read_metric_sample(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "empty metric sample");
    std::istringstream hs(line);
    int n = 0;
    int base = -1;
    if (!(hs >> n) || n <= 0) throw Error(ErrorCode::InvalidArgument, "bad metric sample header");
    if (!(hs >> base)) base = -1;
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(is >> d(i, j))) throw Error(ErrorCode::InvalidArgument, "truncated metric sample");
    return FiniteMetricSample(std::move(d), base);
}

void write_metric_sample(const FiniteMetricSample& S, std::ostream& os) {
    char buf[64];
    os << S.size();
    if (S.base() >= 0) os << ' ' << S.base();
    os << '\n';
    for (int i = 0; i < S.size(); ++i) {
        for (int j = 0; j < S.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", S(i, j));
            os << (j ? " " : "") << buf;
        }
        os << '\n';
    }
}

double gromov_product(const FiniteMetricSample& S, int x, int y, int o) {
    const int n = S.size();
    if (x < 0 || y < 0 || o < 0 || x >= n || y >= n || o >= n)
        throw Error(ErrorCode::InvalidArgument, "index out of range");
    return 0.5 * (S(x, o) + S(y, o) - S(x, y));
}

namespace {

// For four points the worst ordered role assignment gives (largest - second largest pair sum) / 2.
inline double quad_delta(double s1, double s2, double s3) {
    double a = s1, b = s2, c = s3;
    if (a < b) std::swap(a, b);
    if (b < c) std::swap(b, c);
    if (a < b) std::swap(a, b);
    return 0.5 * (a - b);
}

}  // namespace

DeltaResult delta_hyperbolicity(const FiniteMetricSample& S, std::uint64_t seed, long long sampled_tuples) {
    const int n = S.size();
    if (n < 4) throw Error(ErrorCode::TooFewPoints, "four-point condition needs at least 4 points");
    const Eigen::MatrixXd& d = S.matrix();
    DeltaResult out;
    double delta = 0.0;
    if (n <= 400) {
        long long count = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double dij = d(i, j);
                for (int k = j + 1; k < n; ++k) {
                    const double dik = d(i, k), djk = d(j, k);
                    for (int l = k + 1; l < n; ++l) {
                        const double v = quad_delta(dij + d(k, l), dik + d(j, l), d(i, l) + djk);
                        if (v > delta) delta = v;
                    }
                    count += n - k - 1;
                }
            }
        out.tuples = count;
        out.exhaustive = true;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (long long t = 0; t < sampled_tuples; ++t) {
            const int i = pick(rng), j = pick(rng), k = pick(rng), l = pick(rng);
            const double v = quad_delta(d(i, j) + d(k, l), d(i, k) + d(j, l), d(i, l) + d(j, k));
            if (v > delta) delta = v;
        }
        out.tuples = sampled_tuples;
        out.exhaustive = false;
    }
    out.delta = delta;
    return out;
}

// ---------------------------------------------------------------- fillings

double filling_formula(double d, double u, double v) {
    return 2.0 * std::log((d + std::max(u, v)) / std::sqrt(u * v));
}

double filling_metric_g(const DefiningFunction& phi, const CcProvider& cc, const CVec& x, const CVec& y) {
    const PointFrame fx = point_frame(phi, x);
    const PointFrame fy = point_frame(phi, y);
    const double dcc = (fx.foot - fy.foot).norm() < 1e-12 ? 0.0 : cc(fx.foot, fy.foot);
    return filling_formula(dcc, std::sqrt(fx.depth), std::sqrt(fy.depth));
}

double con_filling_distance(const FiniteMetricSample& Z, double diam_bound, const FillingPoint& a, const FillingPoint& b) {
    for (const FillingPoint* f : {&a, &b})
        if (!(f->u > 0.0 && f->u < diam_bound))
            throw Error(ErrorCode::HeightOutOfRange, "height must lie in (0, D)");
    return filling_formula(Z(a.x, b.x), a.u, b.u);
}

// ---------------------------------------------------------------- Bourdon functions

const char* bourdon_method_name(BourdonMethod m) {
    return m == BourdonMethod::ClosedForm ? "closed-form" : "sequence-limit";
}

std::vector<double> height_schedule(double h0, int steps) {
    if (!(h0 > 0.0) || steps < 2) throw Error(ErrorCode::InvalidArgument, "bad height schedule");
    std::vector<double> h(steps);
    for (int i = 0; i < steps; ++i) h[i] = std::ldexp(h0, -i);
    return h;
}

double bourdon_sequence_limit(const std::function<double(double)>& product_at_height, const std::vector<double>& heights) {
    const std::size_t m = heights.size();
    if (m < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 heights");
    for (std::size_t i = 1; i < m; ++i)
        if (!(heights[i] < heights[i - 1] && heights[i] > 0.0))
            throw Error(ErrorCode::InvalidArgument, "heights must decrease strictly to 0");
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = std::exp(-product_at_height(heights[i]));
    // Richardson step at index i with the order observed on (i-2, i-1, i); error ~ c h^p.
    auto richardson = [&](std::size_t i) {
        const double d1 = v[i - 1] - v[i - 2];
        const double d2 = v[i] - v[i - 1];
        if (d2 == 0.0) return v[i];
        const double rho1 = heights[i - 2] / heights[i - 1];
        const double rho2 = heights[i - 1] / heights[i];
        double p = 1.0;
        if (d1 != 0.0 && d1 / d2 > 1.0) p = std::clamp(std::log(d1 / d2) / std::log(0.5 * (rho1 + rho2)), 0.5, 4.0);
        return v[i] + d2 / (std::pow(rho2, p) - 1.0);
    };
    const double last = richardson(m - 1);
    const double prev = richardson(m - 2);
    if (std::abs(last - prev) > 1e-6)
        throw Error(ErrorCode::NonConvergentSequence,
                    "extrapolated values differ by " + std::to_string(std::abs(last - prev)));
    return std::max(0.0, last);
}

double bourdon_value_g(const DefiningFunction& phi, const CcProvider& cc, const CVec& o, const CVec& p, const CVec& q,
                       const std::vector<double>& heights) {
    if ((p - q).norm() == 0.0) return 0.0;
    const PointFrame fo = point_frame(phi, o);
    const double ho = std::sqrt(fo.depth);
    const double dpo = (p - fo.foot).norm() < 1e-12 ? 0.0 : cc(p, fo.foot);
    const double dqo = (q - fo.foot).norm() < 1e-12 ? 0.0 : cc(q, fo.foot);
    const double dpq = cc(p, q);
    return bourdon_sequence_limit(
        [&](double h) {
            return 0.5 * (filling_formula(dpo, h, ho) + filling_formula(dqo, h, ho) - filling_formula(dpq, h, h));
        },
        heights);
}

double bourdon_value_con(const FiniteMetricSample& Z, double diam_bound, const FillingPoint& o, int x, int y,
                         const std::vector<double>& heights) {
    if (x == y || Z(x, y) == 0.0) return 0.0;
    return bourdon_sequence_limit(
        [&](double h) {
            const FillingPoint a{x, h}, b{y, h};
            return 0.5 * (con_filling_distance(Z, diam_bound, a, o) + con_filling_distance(Z, diam_bound, b, o) -
                          con_filling_distance(Z, diam_bound, a, b));
        },
        heights);
}

double bourdon_value_interior(const DefiningFunction& phi, const std::function<double(const CVec&, const CVec&)>& dist,
                              const CVec& o, const CVec& p, const CVec& q, const std::vector<double>& heights) {
    if ((p - q).norm() == 0.0) return 0.0;
    const CVec np = complex_normal(phi, p);
    const CVec nq = complex_normal(phi, q);
    return bourdon_sequence_limit(
        [&](double h) {
            const CVec x = p - (h * h) * np;
            const CVec y = q - (h * h) * nq;
            return 0.5 * (dist(x, o) + dist(y, o) - dist(x, y));
        },
        heights);
}

double bourdon_closed_form_g(const DefiningFunction& phi, const CcProvider& cc, const CVec& o, const CVec& p, const CVec& q) {
    if ((p - q).norm() == 0.0) return 0.0;
    const PointFrame fo = point_frame(phi, o);
    const double ho = std::sqrt(fo.depth);
    const double dpo = (p - fo.foot).norm() < 1e-12 ? 0.0 : cc(p, fo.foot);
    const double dqo = (q - fo.foot).norm() < 1e-12 ? 0.0 : cc(q, fo.foot);
    return cc(p, q) * ho / ((dpo + ho) * (dqo + ho));
}

double bourdon_closed_form_con(const FiniteMetricSample& Z, const FillingPoint& o, int x, int y) {
    return o.u * Z(x, y) / ((Z(x, o.x) + o.u) * (Z(y, o.x) + o.u));
}

double ball_bourdon_kobayashi(const CVec& o, const CVec& p, const CVec& q) {
    const double oo = o.squaredNorm();
    return std::sqrt((1.0 - oo) * std::abs(1.0 - herm(p, q)) /
                     (2.0 * std::abs(1.0 - herm(p, o)) * std::abs(1.0 - herm(q, o))));
}

void write_bourdon_csv(const std::vector<BourdonValue>& rows, std::ostream& os) {
    char buf[64];
    os << "p,q,value,method\n";
    for (const BourdonValue& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.value);
        os << r.p << ',' << r.q << ',' << buf << ',' << bourdon_method_name(r.method) << '\n';
    }
}

double quasi_triangle_constant(const FiniteMetricSample& S) {
    const int n = S.size();
    double tau = 0.0;
    for (int p = 0; p < n; ++p)
        for (int r = 0; r < n; ++r) {
            if (p == r || S(p, r) == 0.0) continue;
            for (int q = 0; q < n; ++q) {
                const double den = S(p, q) + S(q, r);
                if (den > 0.0) tau = std::max(tau, S(p, r) / den);
            }
        }
    return tau;
}

// ---------------------------------------------------------------- conformal ratio

RatioLimit conformal_ratio_limit(const ScaledPair& eval, std::size_t directions, const std::vector<double>& radii,
                                 double tol) {
    if (directions == 0 || radii.size() < 3) throw Error(ErrorCode::InvalidArgument, "need directions and >= 3 radii");
    RatioLimit out;
    const std::size_t J = radii.size() - 1;
    for (std::size_t k = 0; k < directions; ++k) {
        std::vector<double> rho(radii.size());
        for (std::size_t j = 0; j <= J; ++j) {
            const auto [d1, d2] = eval(k, radii[j]);
            if (!(d1 > 0.0)) throw Error(ErrorCode::NonConvergent, "reference distance vanished");
            rho[j] = d2 / d1;
        }
        auto extrap = [&](std::size_t j) {
            return rho[j] - radii[j] * (rho[j - 1] - rho[j]) / (radii[j - 1] - radii[j]);
        };
        const double a = extrap(J), b = extrap(J - 1);
        if (!std::isfinite(a) || std::abs(a - b) > tol * std::abs(a))
            throw Error(ErrorCode::NonConvergent, "ratio extrapolation drifts along direction " + std::to_string(k),
                        static_cast<long>(k));
        out.per_direction.push_back(a);
    }
    const auto [mn, mx] = std::minmax_element(out.per_direction.begin(), out.per_direction.end());
    double mean = 0.0;
    for (double v : out.per_direction) mean += v;
    mean /= static_cast<double>(directions);
    out.limit = mean;
    out.spread = (*mx - *mn) / std::abs(mean);
    if (out.spread > tol)
        throw Error(ErrorCode::DirectionalMismatch, "directional spread " + std::to_string(out.spread));
    return out;
}

}  // namespace visualmetrics
