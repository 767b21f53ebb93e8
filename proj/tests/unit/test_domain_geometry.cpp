#include "generators.hpp"

#include "visualmetrics/domain_geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace visualmetrics;
using vmtest::c2;

namespace {

struct MeshHit {
    CVec point;
    double distance;
};

// Nearest point on |z1|^2 + 4|z2|^2 = 1 by zooming grids over (t, alpha, beta) with
// z1 = cos t e^{i alpha}, z2 = (sin t / 2) e^{i beta}.
MeshHit ellipsoid_mesh_nearest(const CVec& x) {
    auto point = [](double t, double al, double be) {
        return c2(std::cos(t) * std::polar(1.0, al), 0.5 * std::sin(t) * std::polar(1.0, be));
    };
    double ct = M_PI / 4, ca = M_PI, cb = M_PI;
    double wt = M_PI / 4, wa = M_PI, wb = M_PI;
    double best = 1e300;
    const int G = 48;
    for (int round = 0; round < 40; ++round) {
        double bt = ct, ba = ca, bb = cb;
        for (int i = 0; i <= G; ++i)
            for (int j = 0; j <= G; ++j)
                for (int k = 0; k <= G; ++k) {
                    const double t = std::clamp(ct + wt * (2.0 * i / G - 1.0), 0.0, M_PI / 2);
                    const double al = ca + wa * (2.0 * j / G - 1.0);
                    const double be = cb + wb * (2.0 * k / G - 1.0);
                    const double d = (point(t, al, be) - x).norm();
                    if (d < best) {
                        best = d;
                        bt = t;
                        ba = al;
                        bb = be;
                    }
                }
        ct = bt;
        ca = ba;
        cb = bb;
        wt *= 0.25;
        wa *= 0.25;
        wb *= 0.25;
    }
    return {point(ct, ca, cb), best};
}

// d^2|z| / dz_a dzbar_b = delta_ab / (2|z|) - conj(z_a) z_b / (4|z|^3).
CMat ball_symbolic_hessian(const CVec& z) {
    const int n = static_cast<int>(z.size());
    const double r = z.norm();
    CMat H(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            H(a, b) = (a == b ? 1.0 / (2 * r) : 0.0) - std::conj(z[a]) * z[b] / (4 * r * r * r);
    return H;
}

// Complex Hessian assembled from central differences of the real gradient.
CMat fd_complex_hessian(const DefiningFunction& phi, const CVec& z) {
    const int n = phi.dimension();
    const double step = 1e-5;
    RMat H(2 * n, 2 * n);
    const RVec x = to_real(z);
    for (int j = 0; j < 2 * n; ++j) {
        RVec xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        H.col(j) = (phi.gradient(to_complex(xp)) - phi.gradient(to_complex(xm))) / (2 * step);
    }
    CMat C(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            C(a, b) = 0.25 * cplx(H(2 * a, 2 * b) + H(2 * a + 1, 2 * b + 1), H(2 * a, 2 * b + 1) - H(2 * a + 1, 2 * b));
    return 0.5 * (C + C.adjoint());
}

}  // namespace

TEST(SignedDistance, BallRadial) {
    BallFunction ball(2);
    EXPECT_NEAR(signed_distance(ball, c2(0.6, 0.0)), -0.4, 1e-12);
}

TEST(SignedDistance, BoundaryPointIsZero) {
    BallFunction ball(2);
    EXPECT_EQ(signed_distance(ball, c2(1.0, 0.0)), 0.0);
}

TEST(SignedDistance, EllipsoidMatchesMeshOracle) {
    EllipsoidFunction ell({1.0, 4.0});
    const CVec x = c2(0.0, 0.25);
    const MeshHit hit = ellipsoid_mesh_nearest(x);
    EXPECT_NEAR(signed_distance(ell, x), -hit.distance, 1e-6);
}

TEST(Projection, BallRadial) {
    BallFunction ball(2);
    const Projection P = project_to_boundary(ball, c2(0.6, 0.0));
    EXPECT_NEAR((P.point - c2(1.0, 0.0)).norm(), 0.0, 1e-14);
    EXPECT_NEAR(P.distance, 0.4, 1e-14);
}

TEST(Projection, BoundaryPointIsFixed) {
    EllipsoidFunction ell({1.0, 4.0});
    const CVec p = c2(std::sqrt(0.5), std::sqrt(0.125));
    ASSERT_NEAR(ell.value(p), 0.0, 1e-15);
    EXPECT_NEAR((project_to_boundary(ell, p).point - p).norm(), 0.0, 1e-12);
}

TEST(Projection, EllipsoidMatchesMeshOracle) {
    EllipsoidFunction ell({1.0, 4.0});
    const CVec x = c2(0.0, 0.25);
    const Projection P = project_to_boundary(ell, x);
    const MeshHit hit = ellipsoid_mesh_nearest(x);
    EXPECT_LT((P.point - hit.point).norm(), 1e-5);
    EXPECT_LT(std::abs(ell.value(P.point)), 1e-12);
}

TEST(Projection, RefusesBeyondTubularRadius) {
    // Curvature radius at (1, 0) is 0.25; (0.5, 0) lies on the medial axis.
    EllipsoidFunction ell({1.0, 4.0});
    try {
        project_to_boundary(ell, c2(0.5, 0.0));
        FAIL() << "expected OutsideTubular";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutsideTubular);
    }
}

TEST(Height, BallValues) {
    BallFunction ball(2);
    EXPECT_NEAR(height(ball, c2(0.75, 0.0)), 0.5, 1e-14);
    EXPECT_NEAR(height(ball, c2(0.96, 0.0)), 0.2, 1e-14);
}

TEST(Height, RejectsExteriorPoints) {
    BallFunction ball(2);
    try {
        height(ball, c2(1.2, 0.0));
        FAIL() << "expected NotInDomain";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotInDomain);
    }
}

TEST(Height, EllipsoidConsistentWithSignedDistance) {
    EllipsoidFunction ell({1.0, 4.0});
    vmtest::for_all(20, 11, [&](vmtest::Gen& g, int) {
        const CVec p = ray_to_boundary(ell, g.gaussian(2));
        const CVec x = p - g.uniform(0.01, 0.2) * complex_normal(ell, p);
        EXPECT_NEAR(height(ell, x), std::sqrt(std::abs(signed_distance(ell, x))), 1e-10);
    });
}

TEST(BoundaryFrame, BallSplitting) {
    BallFunction ball(2);
    const BoundaryFrame F = boundary_frame(ball, c2(1.0, 0.0));
    const CVec Z = c2(cplx(0, 1), 2.0);
    EXPECT_NEAR((F.normal_part(Z) - c2(cplx(0, 1), 0.0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((F.horizontal(Z) - c2(0.0, 2.0)).norm(), 0.0, 1e-15);
}

TEST(BoundaryFrame, BallLeviValue) {
    BallFunction ball(2);
    const BoundaryFrame F = boundary_frame(ball, c2(1.0, 0.0));
    EXPECT_NEAR(F.levi_form(c2(0.0, 1.0)), 0.5, 1e-14);
}

TEST(BoundaryFrame, NormalVectorHasNoHorizontalPart) {
    BallFunction ball(2);
    const BoundaryFrame F = boundary_frame(ball, c2(1.0, 0.0));
    const CVec Z = c2(cplx(0.3, -0.7), 0.0);
    EXPECT_NEAR(F.horizontal(Z).norm(), 0.0, 1e-15);
    EXPECT_NEAR(F.levi_form(F.horizontal(Z)), 0.0, 1e-15);
}

TEST(BoundaryFrame, FlatBoundaryIsRejected) {
    // Half-space Re z1 < 1: the Levi form vanishes.
    ImplicitFunction flat(2, [](const CVec& z) { return z[0].real() - 1.0; }, 1.0, 2.0);
    try {
        boundary_frame(flat, c2(1.0, 0.0));
        FAIL() << "expected NotStrictlyPseudoconvex";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotStrictlyPseudoconvex);
    }
}

TEST(BoundaryFrame, RequiresBoundaryPoint) {
    BallFunction ball(2);
    EXPECT_THROW(boundary_frame(ball, c2(0.9, 0.0)), Error);
}

TEST(TubularRadius, BallAtLeastHalf) {
    BallFunction ball(2);
    EXPECT_GE(estimate_tubular_radius(ball, 100, 7).radius, 0.5);
}

TEST(TubularRadius, ScalesWithRadius) {
    BallFunction b1(2, 1.0), b2(2, 2.0);
    const double r1 = estimate_tubular_radius(b1, 100, 3).radius;
    const double r2 = estimate_tubular_radius(b2, 100, 3).radius;
    EXPECT_NEAR(r2 / r1, 2.0, 0.05);
}

TEST(TubularRadius, Deterministic) {
    EllipsoidFunction ell({1.0, 4.0});
    EXPECT_EQ(estimate_tubular_radius(ell, 100, 5).radius, estimate_tubular_radius(ell, 100, 5).radius);
}

TEST(TubularRadius, NeedsEnoughSamples) {
    BallFunction ball(2);
    EXPECT_THROW(estimate_tubular_radius(ball, 50, 1), Error);
}

TEST(MakeDomain, BuiltIns) {
    EXPECT_EQ(make_domain("ball", {3, 1})->dimension(), 3);
    EXPECT_EQ(make_domain("ellipsoid", {1, 4})->name(), "ellipsoid");
    EXPECT_THROW(make_domain("torus", {}), Error);
}

// ---------------------------------------------------------------- properties

namespace {

std::vector<std::unique_ptr<DefiningFunction>> builtin_domains() {
    std::vector<std::unique_ptr<DefiningFunction>> out;
    out.push_back(std::make_unique<BallFunction>(2));
    out.push_back(std::make_unique<BallFunction>(3));
    out.push_back(std::make_unique<EllipsoidFunction>(std::vector<double>{1.0, 4.0}));
    out.push_back(std::make_unique<EllipsoidFunction>(std::vector<double>{1.0, 2.0, 3.0}));
    return out;
}

}  // namespace

TEST(DomainProperties, ReconstructionIdentity) {
    for (const auto& phi : builtin_domains()) {
        const TubularNeighborhood T = estimate_tubular_radius(*phi, 100, 1);
        vmtest::for_all(200, 21, [&](vmtest::Gen& g, int) {
            const CVec p = sample_boundary_point(*phi, g.rng());
            const CVec x = p - g.uniform(0.0, 0.9) * T.radius * complex_normal(*phi, p);
            const Projection P = project_to_boundary(*phi, x);
            const CVec back = P.point - P.distance * complex_normal(*phi, P.point);
            EXPECT_LT((back - x).norm(), 1e-8) << phi->name();
        });
    }
}

TEST(DomainProperties, SplittingProjectors) {
    for (const auto& phi : builtin_domains()) {
        const int n = phi->dimension();
        const CMat I = CMat::Identity(n, n);
        vmtest::for_all(200, 22, [&](vmtest::Gen& g, int) {
            const BoundaryFrame F = boundary_frame(*phi, sample_boundary_point(*phi, g.rng()));
            EXPECT_LT((F.P_H * F.P_H - F.P_H).norm(), 1e-10);
            EXPECT_LT((F.P_N * F.P_N - F.P_N).norm(), 1e-10);
            EXPECT_LT((F.P_H + F.P_N - I).norm(), 1e-10);
            EXPECT_LT((F.P_H * F.P_N).norm(), 1e-10);
        });
    }
}

TEST(DomainProperties, LeviHermitianPositiveDefinite) {
    for (const auto& phi : builtin_domains()) {
        vmtest::for_all(1000, 23, [&](vmtest::Gen& g, int) {
            const BoundaryFrame F = boundary_frame(*phi, sample_boundary_point(*phi, g.rng()));
            EXPECT_LT((F.levi - F.levi.adjoint()).norm(), 1e-12);
            Eigen::SelfAdjointEigenSolver<CMat> es(F.levi_H, Eigen::EigenvaluesOnly);
            EXPECT_GT(es.eigenvalues().minCoeff(), 1e-12);
        });
    }
}

TEST(DomainProperties, SignedDistanceIsOneLipschitz) {
    for (const auto& phi : builtin_domains()) {
        const int n = phi->dimension();
        vmtest::for_all(200, 24, [&](vmtest::Gen& g, int) {
            const CVec p = sample_boundary_point(*phi, g.rng());
            const CVec x = p - g.uniform(0.0, 0.2) * complex_normal(*phi, p);
            const CVec y = x + 0.05 * g.sphere(n);
            const double dx = signed_distance(*phi, x), dy = signed_distance(*phi, y);
            EXPECT_LE(std::abs(dx - dy), (x - y).norm() + 1e-8);
        });
    }
}

TEST(DomainProperties, ComplexHessianMatchesFiniteDifferences) {
    for (const auto& phi : builtin_domains()) {
        const int n = phi->dimension();
        vmtest::for_all(100, 25, [&](vmtest::Gen& g, int) {
            const CVec z = g.sphere(n, g.uniform(0.5, 1.2));
            const CMat C = phi->complex_hessian(z);
            const CMat D = fd_complex_hessian(*phi, z);
            EXPECT_LT((C - D).norm(), 1e-5 * C.norm());
        });
    }
}

TEST(DomainProperties, BallHessianMatchesSymbolicForm) {
    BallFunction ball(3);
    vmtest::for_all(100, 26, [&](vmtest::Gen& g, int) {
        const CVec z = g.sphere(3, g.uniform(0.5, 1.5));
        EXPECT_LT((ball.complex_hessian(z) - ball_symbolic_hessian(z)).norm(), 1e-13);
    });
}
