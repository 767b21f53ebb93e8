#include "generators.hpp"

#include "visualmetrics/boundary_cc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

using namespace visualmetrics;
using vmtest::c2;

namespace {

// CC distance from p to e^{i theta} p on the unit sphere in C^2 (Levi form |Z_H|^2 / 2).
// Horizontal lift of a circle: gamma(s) = (cos r e^{i theta s}, sin r e^{i (theta - 2 pi) s}) with
// sin^2 r = theta / (2 pi) has Euclidean length sqrt(theta (2 pi - theta)).
double hopf_fiber_distance(double theta) { return std::sqrt(theta * (2 * M_PI - theta) / 2.0); }

// Endpoint (W, V) and length of w(s) = int_0^s a e^{-i omega tau} d tau, V = 2 int Im(w conj(w')) ds.
void integrate_model_curve(const CVec& a, double omega, int steps, CVec& W, double& V, double& length) {
    const int m = static_cast<int>(a.size());
    W = CVec::Zero(m);
    V = 0.0;
    length = 0.0;
    const double ds = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const double s = (i + 0.5) * ds;
        const CVec wp = a * std::exp(cplx(0.0, -omega * s));
        // Midpoint position from the exact primitive.
        CVec w = a * s;
        if (std::abs(omega) > 1e-14) w = a * ((1.0 - std::exp(cplx(0.0, -omega * s))) / cplx(0.0, omega));
        V += 2.0 * herm(w, wp).imag() * ds;
        W += wp * ds;
        length += wp.norm() * ds;
    }
}

DiscreteCurve great_circle(double angle, int segments) {
    std::vector<CVec> nodes;
    for (int i = 0; i <= segments; ++i) {
        const double s = angle * i / segments;
        nodes.push_back(c2(std::cos(s), std::sin(s)));
    }
    return DiscreteCurve::from_nodes(nodes);
}

}  // namespace

TEST(ApproxNorm, HorizontalVectorIndependentOfK) {
    BallFunction ball(2);
    for (double k : {1.0, 4.0, 64.0}) {
        const ApproxMetric A{&ball, k};
        EXPECT_NEAR(approx_norm(A, c2(1.0, 0.0), c2(0.0, 1.0)), std::sqrt(0.5), 1e-14);
    }
}

TEST(ApproxNorm, ReebDirectionScalesWithK) {
    BallFunction ball(2);
    for (double k : {1.0, 4.0, 64.0}) {
        const ApproxMetric A{&ball, k};
        EXPECT_NEAR(approx_norm(A, c2(1.0, 0.0), c2(cplx(0.0, 0.3), 0.0)), 0.3 * k, 1e-13 * k);
    }
}

TEST(ApproxNorm, IncreasesWithK) {
    BallFunction ball(2);
    const CVec Z = c2(cplx(0.0, 0.2), 0.7);
    EXPECT_LT(approx_norm({&ball, 2.0}, c2(1.0, 0.0), Z), approx_norm({&ball, 4.0}, c2(1.0, 0.0), Z));
}

TEST(ApproxNorm, RejectsNormalComponent) {
    BallFunction ball(2);
    try {
        approx_norm({&ball, 1.0}, c2(1.0, 0.0), c2(1.0, 0.0));
        FAIL() << "expected NotTangent";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotTangent);
    }
}

TEST(Heisenberg, GeodesicReachesItsTarget) {
    vmtest::for_all(50, 41, [](vmtest::Gen& g, int) {
        const CVec W = g.gaussian(1) * g.uniform(0.1, 1.0);
        const double V = g.uniform(-1.0, 1.0);
        const HeisenbergGeodesic geo = heisenberg_geodesic(W, V);
        CVec W2;
        double V2, len;
        integrate_model_curve(geo.a, geo.omega, 20000, W2, V2, len);
        EXPECT_LT((W2 - W).norm(), 1e-7);
        EXPECT_NEAR(V2, V, 1e-7);
        EXPECT_NEAR(len, geo.length, 1e-12);
    });
}

TEST(Heisenberg, HorizontalAndVerticalValues) {
    CVec W(1);
    W[0] = cplx(0.3, 0.4);
    EXPECT_NEAR(heisenberg_distance(W, 0.0), 0.5, 1e-14);
    EXPECT_NEAR(heisenberg_distance(CVec::Zero(1), 0.2), std::sqrt(0.2 * M_PI), 1e-14);
}

TEST(Heisenberg, DilationScaling) {
    vmtest::for_all(100, 42, [](vmtest::Gen& g, int) {
        const CVec W = g.gaussian(1);
        const double V = g.uniform(-2.0, 2.0), lam = g.uniform(0.01, 10.0);
        EXPECT_NEAR(heisenberg_distance(lam * W, lam * lam * V), lam * heisenberg_distance(W, V),
                    1e-9 * lam * heisenberg_distance(W, V));
    });
}

TEST(CcDistance, CoincidentPoints) {
    BallFunction ball(2);
    EXPECT_EQ(cc_distance(ball, c2(1.0, 0.0), c2(1.0, 0.0)).distance, 0.0);
}

TEST(CcDistance, HorizontalGreatCircle) {
    BallFunction ball(2);
    const double d = cc_distance(ball, c2(1.0, 0.0), c2(std::cos(0.2), std::sin(0.2))).distance;
    EXPECT_LE(d, 0.2 / std::sqrt(2.0) * 1.02);
    EXPECT_NEAR(d, 0.2 / std::sqrt(2.0), 1e-6);
}

TEST(CcDistance, HopfFiberOracle) {
    BallFunction ball(2);
    const CVec p = c2(1.0, 0.0);
    for (double t : {0.1, 0.3}) {
        const double theta = std::atan(t);
        const double d = cc_distance(ball, p, vertical_point(ball, p, t)).distance;
        EXPECT_NEAR(d, hopf_fiber_distance(theta), 1e-3 * hopf_fiber_distance(theta)) << "t=" << t;
    }
}

TEST(CcDistance, Symmetric) {
    BallFunction ball(2);
    vmtest::for_all(10, 43, [&](vmtest::Gen& g, int) {
        const CVec p = g.sphere(2);
        const CVec q = snap_to_boundary(ball, CVec(p + 0.2 * g.gaussian(2)));
        CcSolver solver(ball);
        EXPECT_EQ(solver.distance(p, q), solver.distance(q, p));
        const double a = cc_distance(ball, p, q).distance, b = cc_distance(ball, q, p).distance;
        EXPECT_LT(std::abs(a - b), 1e-9 * std::max(1.0, a));
    });
}

TEST(HorizontalLength, GreatCircleArc) {
    BallFunction ball(2);
    const double v = horizontal_length(ball, great_circle(0.2, 256));
    EXPECT_NEAR(v, 0.141421, 1e-4);
    EXPECT_LT(std::abs(horizontal_length(ball, great_circle(0.2, 512)) - v), 1e-4 * v);
}

TEST(HorizontalLength, ZeroLengthCurve) {
    BallFunction ball(2);
    EXPECT_EQ(horizontal_length(ball, DiscreteCurve::from_nodes({c2(1.0, 0.0), c2(1.0, 0.0)})), 0.0);
}

TEST(HorizontalLength, RejectsVerticalSegment) {
    BallFunction ball(2);
    std::vector<CVec> nodes{c2(std::cos(0.1), std::sin(0.1)), c2(1.0, 0.0), c2(std::polar(1.0, 0.1), 0.0)};
    try {
        horizontal_length(ball, DiscreteCurve::from_nodes(nodes));
        FAIL() << "expected NotHorizontal";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotHorizontal);
        EXPECT_EQ(e.index(), 1);
    }
}

TEST(BoundaryGraph, ConnectedSymmetricPositive) {
    BallFunction ball(2);
    const BoundaryGraph G = build_boundary_graph(ball, 3000, 9);
    EXPECT_EQ(G.vertices.size(), 3000u);
    EXPECT_NEAR(G.mean_degree(), 24.0, 8.0);
    for (const BoundaryGraphEdge& e : G.edges) {
        EXPECT_LT(e.i, e.j);
        for (double l : e.length) EXPECT_GT(l, 0.0);
        for (std::size_t k = 1; k < e.length.size(); ++k) EXPECT_GE(e.length[k], e.length[k - 1]);
    }
    EXPECT_GE(G.k_values.front(), 4.0);
}

TEST(BoundaryGraph, TextRoundTripIsExact) {
    BallFunction ball(2);
    const BoundaryGraph G = build_boundary_graph(ball, 800, 4);
    std::ostringstream a;
    write_boundary_graph(G, a);
    std::istringstream in(a.str());
    const BoundaryGraph H = read_boundary_graph(in);
    std::ostringstream b;
    write_boundary_graph(H, b);
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream c;
    write_boundary_graph(build_boundary_graph(ball, 800, 4), c);
    EXPECT_EQ(a.str(), c.str());
}

TEST(BoundaryGraph, ShortestPathsGrowWithK) {
    BallFunction ball(2);
    const BoundaryGraph G = build_boundary_graph(ball, 3000, 5);
    const CVec p = c2(1.0, 0.0), q = c2(std::cos(0.8), std::sin(0.8));
    double prev = 0.0;
    for (std::size_t k = 0; k < G.k_values.size(); ++k) {
        const GraphPath path = graph_shortest_path(ball, G, p, q, static_cast<int>(k));
        EXPECT_GE(path.length, prev - 1e-12);
        EXPECT_EQ((path.nodes.front() - p).norm(), 0.0);
        EXPECT_EQ((path.nodes.back() - q).norm(), 0.0);
        prev = path.length;
    }
}

// ---------------------------------------------------------------- properties

TEST(CcProperties, ApproxDistancesMonotoneAndBelowHorizontalCurves) {
    BallFunction ball(2);
    vmtest::for_all(5, 44, [&](vmtest::Gen& g, int) {
        const CVec p = g.sphere(2);
        const CVec q = snap_to_boundary(ball, CVec(p + 0.3 * g.gaussian(2) / std::sqrt(2.0)));
        const CcResult cc = cc_distance(ball, p, q);
        const std::vector<double> dk = approx_distance_schedule(ball, {4.0, 8.0, 16.0, 32.0, 64.0}, cc.curve);
        for (std::size_t i = 1; i < dk.size(); ++i) EXPECT_GE(dk[i], dk[i - 1] - 1e-9);
        EXPECT_LE(dk.back(), cc.distance + 1e-9);
    });
}

TEST(CcProperties, ApproximationConstantAtK64) {
    BallFunction ball(2);
    double C_hat = 1.0;
    vmtest::for_all(10, 45, [&](vmtest::Gen& g, int) {
        const CVec p = g.sphere(2);
        const CVec q = snap_to_boundary(ball, CVec(p + g.uniform(0.05, 0.4) * g.sphere(2)));
        const CcResult cc = cc_distance(ball, p, q);
        if (cc.distance < 1.0 / 64.0) return;
        // Chord starts stall in local minima with a large vertical part; the geodesic start does not.
        std::vector<CVec> chord;
        for (int i = 0; i <= 16; ++i) chord.push_back(snap_to_boundary(ball, CVec(p + (q - p) * (i / 16.0))));
        const double dk = std::min(approx_distance(ball, 64.0, chord).length, approx_distance(ball, 64.0, cc.curve).length);
        C_hat = std::max({C_hat, dk / cc.distance, cc.distance / dk});
    });
    RecordProperty("C_hat", std::to_string(C_hat));
    std::printf("C_hat(k=64) = %.4f\n", C_hat);
    EXPECT_LE(C_hat, 3.0);
}

TEST(CcProperties, UnitaryInvariance) {
    BallFunction ball(2);
    vmtest::for_all(10, 46, [&](vmtest::Gen& g, int) {
        Eigen::HouseholderQR<CMat> qr(CMat(CMat::NullaryExpr(2, 2, [&]() { return cplx(g.uniform(-1, 1), g.uniform(-1, 1)); })));
        const CMat U = qr.householderQ();
        const CVec p = g.sphere(2);
        const CVec q = snap_to_boundary(ball, CVec(p + 0.3 * g.sphere(2)));
        const double d = cc_distance(ball, p, q).distance;
        const double du = cc_distance(ball, CVec(U * p), CVec(U * q)).distance;
        EXPECT_LT(std::abs(du - d), 0.02 * d);
    });
}

TEST(CcProperties, TriangleInequality) {
    BallFunction ball(2);
    vmtest::for_all(10, 47, [&](vmtest::Gen& g, int) {
        const CVec p = g.sphere(2);
        const CVec q = snap_to_boundary(ball, CVec(p + 0.3 * g.sphere(2)));
        const CVec r = snap_to_boundary(ball, CVec(p + 0.3 * g.sphere(2)));
        CcSolver s(ball);
        EXPECT_LE(s.distance(p, r), 1.02 * (s.distance(p, q) + s.distance(q, r)));
    });
}

TEST(CcProperties, BallBoxScalingAlongVerticalDirection) {
    BallFunction ball(2);
    const CVec p = c2(std::sqrt(0.5), cplx(0.0, std::sqrt(0.5)));
    std::vector<double> lt, ld;
    for (double t = 1e-3; t <= 0.1 + 1e-12; t *= std::sqrt(10.0)) {
        lt.push_back(std::log(t));
        ld.push_back(std::log(cc_distance(ball, p, vertical_point(ball, p, t)).distance));
    }
    const double n = static_cast<double>(lt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sx += lt[i];
        sy += ld[i];
        sxx += lt[i] * lt[i];
        sxy += lt[i] * ld[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_GE(slope, 0.45);
    EXPECT_LE(slope, 0.55);
}
