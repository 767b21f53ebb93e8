#include "generators.hpp"

#include "visualmetrics/invariant_metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <iomanip>

using namespace visualmetrics;
using vmtest::c2;

namespace {

// Distance through the Moebius map swapping x and 0: arctanh|Phi_x(y)|, with
// |Phi_x(y)|^2 = 1 - (1-|x|^2)(1-|y|^2) / |1 - <y,x>|^2.
double mobius_oracle(const CVec& x, const CVec& y) {
    const double s2 = 1.0 - (1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm()) / std::norm(1.0 - herm(y, x));
    return std::atanh(std::sqrt(std::max(0.0, s2)));
}

DiscreteCurve radial_segment(double r1, double r2, int segments) {
    return DiscreteCurve::segment(c2(r1, 0.0), c2(r2, 0.0), segments);
}

// Random interior curve: knots at random depths in [d_lo, d_hi] above a random boundary path.
DiscreteCurve random_curve(vmtest::Gen& g, int n, int knots, int per_knot, double d_lo, double d_hi) {
    std::vector<CVec> ctrl;
    CVec p = g.sphere(n);
    for (int k = 0; k < knots; ++k) {
        ctrl.push_back((1.0 - g.uniform(d_lo, d_hi)) * p);
        p = p + 0.05 * g.gaussian(n);
        p /= p.norm();
    }
    std::vector<CVec> nodes;
    for (int k = 0; k + 1 < knots; ++k)
        for (int s = 0; s < per_knot; ++s) nodes.push_back(ctrl[k] + (ctrl[k + 1] - ctrl[k]) * (double(s) / per_knot));
    nodes.push_back(ctrl.back());
    return DiscreteCurve::from_nodes(nodes);
}

double fitted_C() {
    static const double C = fit_ball_envelope_constant(2, 0.05, 20000, 0xc0ffee);
    return C;
}

}  // namespace

TEST(FinslerNorm, RadialModelCenter) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    EXPECT_NEAR(finsler_norm(M, c2(0.9, 0.0), c2(1.0, 0.0)), 5.0, 1e-12);
}

TEST(FinslerNorm, ExactBallNormAndEnvelope) {
    const double exact = ball_kobayashi_norm(c2(0.9, 0.0), c2(1.0, 0.0));
    EXPECT_NEAR(exact, 1.0 / (1.0 - 0.81), 1e-12);
    EXPECT_NEAR(exact, 5.263158, 1e-6);
    const double ratio = exact / 5.0;
    EXPECT_NEAR(ratio, 1.0526, 1e-4);
    EXPECT_LE(ratio, 1.0 + 0.17 * std::sqrt(0.1));
}

TEST(FinslerNorm, ZeroVector) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.1, 0.05, FinslerMode::UpperEnvelope};
    EXPECT_EQ(finsler_norm(M, c2(0.9, 0.0), c2(0.0, 0.0)), 0.0);
}

TEST(FinslerNorm, RejectsExteriorPoint) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    EXPECT_THROW(finsler_norm(M, c2(1.1, 0.0), c2(1.0, 0.0)), Error);
}

TEST(CurveLength, RadialSegmentIsLogOfHeights) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    const double len = curve_length(M, radial_segment(0.96, 0.99, 20000));
    EXPECT_NEAR(len, 0.5 * std::log(0.04 / 0.01), 1e-8);
    EXPECT_NEAR(len, std::log(height(ball, c2(0.96, 0.0)) / height(ball, c2(0.99, 0.0))), 1e-8);
    EXPECT_NEAR(len, 0.693147, 1e-6);
}

TEST(CurveLength, DegenerateCurve) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    EXPECT_EQ(curve_length(M, DiscreteCurve::from_nodes({c2(0.5, 0.1), c2(0.5, 0.1)})), 0.0);
}

TEST(CurveLength, RefinementConverges) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    vmtest::for_all(10, 31, [&](vmtest::Gen& g, int) {
        DiscreteCurve c = random_curve(g, 2, 5, 128, 0.01, 0.1);
        const double a = curve_length(M, c);
        const double b = curve_length(M, c.refined());
        EXPECT_LT(std::abs(a - b), 1e-4 * a);
    });
}

TEST(CurveLength, BoundBelowOnRandomCurves) {
    BallFunction ball(2);
    const double C = fitted_C();
    const FinslerModel M{&ball, C, 0.05, FinslerMode::LowerEnvelope};
    vmtest::for_all(100, 32, [&](vmtest::Gen& g, int) {
        const DiscreteCurve c = random_curve(g, 2, g.integer(2, 6), 64, 0.001, 0.05);
        double h1 = height(ball, c.nodes.front()), h2 = height(ball, c.nodes.back());
        if (h1 < h2) std::swap(h1, h2);
        EXPECT_GE(curve_length(M, c), std::log(h1 / h2) - C * (h1 - h2) - 1e-6);
    });
}

TEST(Geodesic, RadialPairWithinTenPercentOfOracle) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    const double oracle = std::atanh(0.9) - std::atanh(0.75);
    EXPECT_NEAR(oracle, 0.499264, 1e-6);
    const GeodesicResult r = geodesic_distance(M, c2(0.75, 0.0), c2(0.9, 0.0));
    EXPECT_LT(std::abs(r.length - oracle), 0.1 * oracle);
}

TEST(Geodesic, CoincidentPoints) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    const GeodesicResult r = geodesic_distance(M, c2(0.8, 0.1), c2(0.8, 0.1));
    EXPECT_EQ(r.length, 0.0);
    for (const CVec& v : r.curve.nodes) EXPECT_EQ((v - c2(0.8, 0.1)).norm(), 0.0);
}

TEST(Geodesic, SymmetricAndBelowChord) {
    BallFunction ball(2);
    const FinslerModel M{&ball, 0.0, 0.05, FinslerMode::ModelCenter};
    vmtest::for_all(50, 33, [&](vmtest::Gen& g, int) {
        // Chords through the center leave the collar where the model is defined.
        const CVec x = g.ball_interior(2, 0.02, 0.2);
        CVec y = g.ball_interior(2, 0.02, 0.2);
        while ((x - y).norm() > 1.2) y = g.ball_interior(2, 0.02, 0.2);
        const double a = geodesic_distance(M, x, y).length;
        const double b = geodesic_distance(M, y, x).length;
        EXPECT_LT(std::abs(a - b), 1e-6);
    });
}

TEST(Geodesic, SameFiberWithinEnvelopeBounds) {
    BallFunction ball(2);
    const double C = fitted_C();
    const double h1 = 0.2, h2 = 0.05;
    const CVec x1 = c2(1.0 - h1 * h1, 0.0), x2 = c2(1.0 - h2 * h2, 0.0);
    GeodesicOptions opts;
    opts.segments = 2048;
    const double lo = std::log(h1 / h2) - C * (h1 - h2);
    const double hi = std::log(h1 / h2) + C * (h1 - h2);
    for (FinslerMode mode : {FinslerMode::LowerEnvelope, FinslerMode::UpperEnvelope}) {
        const FinslerModel M{&ball, C, 0.05, mode};
        const double len = geodesic_distance(M, x1, x2, opts).length;
        EXPECT_GE(len, lo - 1e-5) << std::setprecision(12) << len - lo;
        EXPECT_LE(len, hi + 1e-5);
    }
}

TEST(BallOracle, CenterToHalf) {
    const BallOracle O{2};
    EXPECT_NEAR(ball_kobayashi_distance(O, c2(0.0, 0.0), c2(0.5, 0.0)), std::atanh(0.5), 1e-15);
    EXPECT_NEAR(ball_kobayashi_distance(O, c2(0.0, 0.0), c2(0.5, 0.0)), 0.549306, 1e-6);
}

TEST(BallOracle, CoincidentPoints) {
    const BallOracle O{2};
    EXPECT_EQ(ball_kobayashi_distance(O, c2(0.3, cplx(0.1, 0.2)), c2(0.3, cplx(0.1, 0.2))), 0.0);
}

TEST(BallOracle, RejectsBoundaryPoints) {
    const BallOracle O{2};
    EXPECT_THROW(ball_kobayashi_distance(O, c2(1.0, 0.0), c2(0.0, 0.0)), Error);
}

TEST(BallOracle, MatchesMobiusFormula) {
    const BallOracle O{3};
    vmtest::for_all(1000, 34, [&](vmtest::Gen& g, int) {
        const CVec x = g.ball_interior(3, 0.1, 0.9), y = g.ball_interior(3, 0.1, 0.9);
        const double ref = mobius_oracle(x, y);
        EXPECT_NEAR(ball_kobayashi_distance(O, x, y), ref, 1e-12 * std::max(1.0, ref));
    });
}

TEST(BallOracle, UnitaryInvariance) {
    const BallOracle O{2};
    vmtest::for_all(1000, 35, [&](vmtest::Gen& g, int) {
        Eigen::HouseholderQR<CMat> qr(CMat(CMat::NullaryExpr(2, 2, [&]() { return cplx(g.uniform(-1, 1), g.uniform(-1, 1)); })));
        const CMat U = qr.householderQ();
        const CVec x = g.ball_interior(2, 1e-4, 0.9), y = g.ball_interior(2, 1e-4, 0.9);
        const double d = ball_kobayashi_distance(O, x, y);
        EXPECT_NEAR(ball_kobayashi_distance(O, CVec(U * x), CVec(U * y)), d, 1e-12 * std::max(1.0, d));
    });
}

TEST(BallOracle, TriangleInequality) {
    const BallOracle O{2};
    vmtest::for_all(10000, 36, [&](vmtest::Gen& g, int) {
        const CVec x = g.ball_interior(2, 1e-3, 1.0), y = g.ball_interior(2, 1e-3, 1.0), z = g.ball_interior(2, 1e-3, 1.0);
        EXPECT_LE(ball_kobayashi_distance(O, x, z),
                  ball_kobayashi_distance(O, x, y) + ball_kobayashi_distance(O, y, z) + 1e-12);
    });
}

TEST(LiftCurve, BallRadiusAndRoundTrip) {
    BallFunction ball(2);
    std::vector<CVec> nodes;
    for (int i = 0; i <= 16; ++i) nodes.push_back(c2(std::cos(0.05 * i), std::sin(0.05 * i)));
    const DiscreteCurve alpha = DiscreteCurve::from_nodes(nodes);
    const DiscreteCurve gamma = lift_curve(ball, alpha, 0.1);
    for (std::size_t i = 0; i < gamma.nodes.size(); ++i) {
        EXPECT_NEAR(gamma.nodes[i].norm(), 0.9, 1e-14);
        EXPECT_LT((project_to_boundary(ball, gamma.nodes[i]).point - alpha.nodes[i]).norm(), 1e-8);
        EXPECT_NEAR(project_to_boundary(ball, gamma.nodes[i]).distance, 0.1, 1e-8);
    }
    const DiscreteCurve close = lift_curve(ball, alpha, 1e-9);
    for (std::size_t i = 0; i < close.nodes.size(); ++i) EXPECT_LT((close.nodes[i] - alpha.nodes[i]).norm(), 2e-9);
}

TEST(LiftCurve, RejectsHeightBeyondTubularRadius) {
    BallFunction ball(2);
    const DiscreteCurve alpha = DiscreteCurve::from_nodes({c2(1.0, 0.0), c2(0.0, 1.0)});
    try {
        lift_curve(ball, alpha, 1.0);
        FAIL() << "expected OutsideTubular";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutsideTubular);
    }
}

// ---------------------------------------------------------------- properties

TEST(FinslerProperties, Homogeneity) {
    BallFunction ball(2);
    for (FinslerMode mode : {FinslerMode::ModelCenter, FinslerMode::LowerEnvelope, FinslerMode::UpperEnvelope}) {
        const FinslerModel M{&ball, 0.1, 0.05, mode};
        vmtest::for_all(500, 37, [&](vmtest::Gen& g, int) {
            const CVec x = g.ball_interior(2, 1e-3, 0.3);
            const CVec Z = g.gaussian(2);
            const double lam = g.uniform(-5.0, 5.0);
            const double k = finsler_norm(M, x, Z);
            EXPECT_GT(k, 0.0);
            EXPECT_NEAR(finsler_norm(M, x, CVec(lam * Z)), std::abs(lam) * k, 1e-12 * std::abs(lam) * k);
        });
    }
}

TEST(FinslerProperties, EnvelopesSandwichExactBallNorm) {
    BallFunction ball(2);
    const double C = fitted_C();
    const FinslerModel lower{&ball, C, 0.05, FinslerMode::LowerEnvelope};
    const FinslerModel center{&ball, C, 0.05, FinslerMode::ModelCenter};
    const FinslerModel upper{&ball, C, 0.05, FinslerMode::UpperEnvelope};
    vmtest::for_all(10000, 38, [&](vmtest::Gen& g, int) {
        const CVec x = g.ball_interior(2, 1e-5, 0.05);
        const CVec Z = g.gaussian(2);
        const PointFrame F = point_frame(ball, x);
        const double lo = finsler_norm(lower, F, Z), mid = finsler_norm(center, F, Z), hi = finsler_norm(upper, F, Z);
        const double exact = ball_kobayashi_norm(x, Z);
        EXPECT_LE(lo, mid);
        EXPECT_LE(lo, hi);
        EXPECT_LE(lo, exact * (1.0 + 1e-12));
        EXPECT_GE(hi, exact * (1.0 - 1e-12));
    });
}
