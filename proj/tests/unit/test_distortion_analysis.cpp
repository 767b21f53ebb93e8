#include "generators.hpp"

#include "visualmetrics/distortion_analysis.hpp"
#include "visualmetrics/types.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cmath>

using namespace visualmetrics;

namespace {

using P2 = std::array<double, 2>;
using PlaneMap = std::function<P2(const P2&)>;

double dist(const P2& a, const P2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// Focal origin followed by rings at several radii per annulus, 32 angles each (axes included).
std::vector<P2> ring_sample(double r0, int annuli) {
    std::vector<P2> pts{{0.0, 0.0}};
    for (int j = 0; j < annuli; ++j)
        for (double f : {0.55, 0.7, 0.85}) {
            const double r = std::ldexp(r0, -j) * f;
            for (int k = 0; k < 32; ++k) pts.push_back({r * std::cos(M_PI * k / 16), r * std::sin(M_PI * k / 16)});
        }
    return pts;
}

struct PlaneSample {
    std::vector<P2> src;
    std::vector<P2> img;
    SampledMap map(double src_scale = 1.0, double img_scale = 1.0) const {
        SampledMap M;
        M.size = src.size();
        M.focal = 0;
        M.source_distance = [this, src_scale](std::size_t i, std::size_t j) { return src_scale * dist(src[i], src[j]); };
        M.image_distance = [this, img_scale](std::size_t i, std::size_t j) { return img_scale * dist(img[i], img[j]); };
        M.focal_coords = {src[0][0], src[0][1]};
        M.image_focal_coords = {img[0][0], img[0][1]};
        return M;
    }
};

PlaneSample push_forward(const std::vector<P2>& src, const PlaneMap& F) {
    PlaneSample s;
    s.src = src;
    for (const P2& x : src) s.img.push_back(F(x));
    return s;
}

RadiusSchedule schedule(double r0, int annuli = 8, int n_min = 30) {
    RadiusSchedule s;
    s.r0 = r0;
    s.annuli = annuli;
    s.n_min = n_min;
    return s;
}

}  // namespace

TEST(PointwiseDistortion, Identity) {
    const PlaneSample s = push_forward(ring_sample(1.0, 8), [](const P2& x) { return x; });
    const DistortionReport R = pointwise_distortion(s.map(), schedule(1.0));
    EXPECT_DOUBLE_EQ(R.H_star, 1.0);
    EXPECT_DOUBLE_EQ(R.bracket[0], 1.0);
    EXPECT_DOUBLE_EQ(R.bracket[1], 1.0);
}

TEST(PointwiseDistortion, AnisotropicLinearMap) {
    const PlaneSample s = push_forward(ring_sample(1.0, 8), [](const P2& x) { return P2{2 * x[0], x[1]}; });
    const DistortionReport R = pointwise_distortion(s.map(), schedule(1.0));
    EXPECT_NEAR(R.L, 2.0, 1e-12);
    EXPECT_NEAR(R.l, 1.0, 1e-12);
    EXPECT_NEAR(R.H_star, 2.0, 1e-12);
    EXPECT_TRUE(R.bracket_contains(2.0));
}

TEST(PointwiseDistortion, GlobalScaling) {
    const PlaneSample s = push_forward(ring_sample(1.0, 8), [](const P2& x) { return P2{3.5 * x[0], 3.5 * x[1]}; });
    EXPECT_NEAR(pointwise_distortion(s.map(), schedule(1.0)).H_star, 1.0, 1e-14);
}

TEST(PointwiseDistortion, ReportsEmptyAnnulus) {
    const PlaneSample s = push_forward(ring_sample(1.0, 4), [](const P2& x) { return x; });
    try {
        pointwise_distortion(s.map(), schedule(1.0, 6));
        FAIL() << "expected InsufficientSamples";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
        EXPECT_EQ(e.index(), 4);
    }
}

TEST(PointwiseDistortion, JsonFields) {
    const PlaneSample s = push_forward(ring_sample(1.0, 8), [](const P2& x) { return x; });
    const auto j = nlohmann::json::parse(pointwise_distortion(s.map(), schedule(1.0)).to_json());
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    std::sort(keys.begin(), keys.end());
    EXPECT_EQ(keys, (std::vector<std::string>{"H_star", "L", "bracket", "focal", "inf_ratio", "l", "radii", "sup_ratio"}));
}

TEST(ChainBound, TwoIdentities) {
    const PlaneSample s = push_forward(ring_sample(1.0, 8), [](const P2& x) { return x; });
    const DistortionReport R = pointwise_distortion(s.map(), schedule(1.0));
    const ChainResult c = chain_distortion_bound({R, R}, &R);
    EXPECT_DOUBLE_EQ(c.product, 1.0);
    EXPECT_DOUBLE_EQ(c.measured, 1.0);
    EXPECT_TRUE(c.holds);
}

TEST(ChainBound, StrictInequalityForCompensatingStretches) {
    const std::vector<P2> src = ring_sample(1.0, 8);
    const PlaneSample a = push_forward(src, [](const P2& x) { return P2{2 * x[0], x[1]}; });
    const PlaneSample b = push_forward(a.img, [](const P2& x) { return P2{x[0], 2 * x[1]}; });
    const PlaneSample ab = push_forward(src, [](const P2& x) { return P2{2 * x[0], 2 * x[1]}; });
    const DistortionReport Ra = pointwise_distortion(a.map(), schedule(1.0));
    const DistortionReport Rb = pointwise_distortion(b.map(), schedule(2.0));
    const DistortionReport Rab = pointwise_distortion(ab.map(), schedule(1.0));
    const ChainResult c = chain_distortion_bound({Ra, Rb}, &Rab);
    EXPECT_NEAR(c.product, 4.0, 1e-12);
    EXPECT_NEAR(c.measured, 1.0, 1e-12);
    EXPECT_TRUE(c.holds);
}

TEST(ChainBound, RejectsMismatchedFocalPoints) {
    const std::vector<P2> src = ring_sample(1.0, 8);
    PlaneSample a = push_forward(src, [](const P2& x) { return P2{x[0] + 1.0, x[1]}; });
    const DistortionReport Ra = pointwise_distortion(a.map(), schedule(1.0));
    const DistortionReport Rb = pointwise_distortion(push_forward(src, [](const P2& x) { return x; }).map(), schedule(1.0));
    try {
        chain_distortion_bound({Ra, Rb});
        FAIL() << "expected NotComposable";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotComposable);
        EXPECT_EQ(e.index(), 0);
    }
}

TEST(BilipschitzAudit, IdentityAndScaling) {
    std::vector<std::pair<double, double>> id, scaled;
    vmtest::Gen g(61);
    for (int i = 0; i < 150; ++i) {
        const double d = g.uniform(0.01, 1.0);
        id.push_back({d, d});
        scaled.push_back({d, 0.25 * d});
    }
    EXPECT_EQ(bilipschitz_audit(id), 1.0);
    EXPECT_NEAR(bilipschitz_audit(scaled), 4.0, 1e-12);
}

TEST(BilipschitzAudit, NeedsEnoughPairs) {
    std::vector<std::pair<double, double>> few(50, {1.0, 1.0});
    try {
        bilipschitz_audit(few);
        FAIL() << "expected InsufficientSamples";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
    }
}

// ---------------------------------------------------------------- properties

namespace {

// Smooth plane map with a random linear part and a quadratic perturbation.
PlaneMap random_smooth_map(vmtest::Gen& g) {
    const double a = g.uniform(0.5, 2.0), b = g.uniform(-0.5, 0.5), c = g.uniform(-0.5, 0.5), d = g.uniform(0.5, 2.0);
    const double q = g.uniform(-1.0, 1.0);
    return [=](const P2& x) { return P2{a * x[0] + b * x[1] + q * x[0] * x[1], c * x[0] + d * x[1] + q * x[1] * x[1]}; };
}

std::vector<P2> random_disc_sample(vmtest::Gen& g, int count, double r0, int octaves) {
    std::vector<P2> pts{{0.0, 0.0}};
    for (int i = 0; i < count; ++i) {
        const double r = r0 * std::exp2(-octaves * g.uniform(0.0, 1.0));
        const double t = g.uniform(0.0, 2 * M_PI);
        pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return pts;
}

}  // namespace

TEST(DistortionProperties, AtLeastOneAndScaleInvariant) {
    vmtest::for_all(30, 62, [](vmtest::Gen& g, int) {
        const PlaneSample s = push_forward(random_disc_sample(g, 3000, 0.5, 9), random_smooth_map(g));
        const DistortionReport R = pointwise_distortion(s.map(), schedule(0.5));
        EXPECT_GE(R.H_star, 1.0);
        EXPECT_GE(R.L, R.l);
        EXPECT_GT(R.l, 0.0);
        const double k1 = g.uniform(0.1, 10.0), k2 = g.uniform(0.1, 10.0);
        const DistortionReport Rs = pointwise_distortion(s.map(k1, k2), schedule(0.5 * k1));
        EXPECT_NEAR(Rs.H_star, R.H_star, 1e-9 * R.H_star);
    });
}

TEST(DistortionProperties, AnnulusRefinementWithinBracket) {
    vmtest::for_all(20, 63, [](vmtest::Gen& g, int) {
        const PlaneSample s = push_forward(random_disc_sample(g, 4000, 0.5, 10), random_smooth_map(g));
        const DistortionReport A = pointwise_distortion(s.map(), schedule(0.5, 8));
        const DistortionReport B = pointwise_distortion(s.map(), schedule(0.25, 8));
        EXPECT_LE(std::max(A.bracket[0], B.bracket[0]), std::min(A.bracket[1], B.bracket[1]));
    });
}
