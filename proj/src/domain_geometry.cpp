#include "visualmetrics/domain_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace visualmetrics {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::OutsideTubular: return "OutsideTubular";
        case ErrorCode::NotInDomain: return "NotInDomain";
        case ErrorCode::NotStrictlyPseudoconvex: return "NotStrictlyPseudoconvex";
        case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
        case ErrorCode::NotTangent: return "NotTangent";
        case ErrorCode::GraphDisconnected: return "GraphDisconnected";
        case ErrorCode::NotHorizontal: return "NotHorizontal";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::HeightOutOfRange: return "HeightOutOfRange";
        case ErrorCode::NonConvergentSequence: return "NonConvergentSequence";
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::DirectionalMismatch: return "DirectionalMismatch";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::NotComposable: return "NotComposable";
        case ErrorCode::QuantifierSearchFailed: return "QuantifierSearchFailed";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

// ---------------------------------------------------------------- DefiningFunction

DefiningFunction::DefiningFunction(int n) : n_(n) {
    if (n < 2 || n > kMaxDim) throw Error(ErrorCode::InvalidArgument, "complex dimension must be in [2, 4]");
}

RVec DefiningFunction::gradient(const CVec& z) const {
    constexpr double h = 1e-5;
    RVec x = to_real(z);
    RVec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        RVec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (value(to_complex(xp)) - value(to_complex(xm))) / (2 * h);
    }
    return g;
}

RMat DefiningFunction::real_hessian(const CVec& z) const {
    RVec x = to_real(z);
    const Eigen::Index m = x.size();
    RMat H(m, m);
    if (derivative_source() == DerivativeSource::Analytic) {
        constexpr double h = 1e-5;
        for (Eigen::Index j = 0; j < m; ++j) {
            RVec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            H.col(j) = (gradient(to_complex(xp)) - gradient(to_complex(xm))) / (2 * h);
        }
    } else {
        constexpr double h = 1e-4;
        const double f0 = value(z);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i; j < m; ++j) {
                if (i == j) {
                    RVec xp = x, xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    H(i, i) = (value(to_complex(xp)) - 2 * f0 + value(to_complex(xm))) / (h * h);
                } else {
                    RVec a = x, b = x, c = x, d = x;
                    a[i] += h; a[j] += h;
                    b[i] += h; b[j] -= h;
                    c[i] -= h; c[j] += h;
                    d[i] -= h; d[j] -= h;
                    H(i, j) = (value(to_complex(a)) - value(to_complex(b)) - value(to_complex(c)) +
                               value(to_complex(d))) / (4 * h * h);
                    H(j, i) = H(i, j);
                }
            }
        }
    }
    return 0.5 * (H + H.transpose());
}

CMat DefiningFunction::complex_hessian(const CVec& z) const {
    const RMat H = real_hessian(z);
    CMat C(n_, n_);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            const double re = H(2 * a, 2 * b) + H(2 * a + 1, 2 * b + 1);
            const double im = H(2 * a, 2 * b + 1) - H(2 * a + 1, 2 * b);
            C(a, b) = 0.25 * cplx(re, im);
        }
    }
    return 0.5 * (C + C.adjoint());
}

CMat DefiningFunction::complex_hessian_bar(const CVec& z) const {
    const RMat H = real_hessian(z);
    CMat S(n_, n_);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            const double re = H(2 * a, 2 * b) - H(2 * a + 1, 2 * b + 1);
            const double im = H(2 * a, 2 * b + 1) + H(2 * a + 1, 2 * b);
            S(a, b) = 0.25 * cplx(re, im);
        }
    }
    return 0.5 * (S + S.transpose());
}

CVec DefiningFunction::center() const { return CVec::Zero(n_); }

bool DefiningFunction::exact_projection(const CVec&, CVec&) const { return false; }

// ---------------------------------------------------------------- built-ins

BallFunction::BallFunction(int n, double radius) : DefiningFunction(n), radius_(radius) {
    if (!(radius > 0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
}

double BallFunction::value(const CVec& z) const { return z.norm() - radius_; }

RVec BallFunction::gradient(const CVec& z) const {
    RVec x = to_real(z);
    const double r = x.norm();
    if (r == 0.0) return RVec::Zero(x.size());
    return x / r;
}

RMat BallFunction::real_hessian(const CVec& z) const {
    RVec x = to_real(z);
    const double r = x.norm();
    const Eigen::Index m = x.size();
    if (r == 0.0) return RMat::Zero(m, m);
    RVec u = x / r;
    return (RMat::Identity(m, m) - u * u.transpose()) / r;
}

RVec BallFunction::box_lo() const { return RVec::Constant(2 * n_, -radius_); }
RVec BallFunction::box_hi() const { return RVec::Constant(2 * n_, radius_); }

bool BallFunction::exact_projection(const CVec& x, CVec& p) const {
    const double r = x.norm();
    if (r == 0.0) return false;
    p = x * (radius_ / r);
    return true;
}

EllipsoidFunction::EllipsoidFunction(std::vector<double> a)
    : DefiningFunction(static_cast<int>(a.size())), a_(std::move(a)) {
    for (double v : a_)
        if (!(v > 0)) throw Error(ErrorCode::InvalidArgument, "ellipsoid coefficients must be positive");
}

double EllipsoidFunction::value(const CVec& z) const {
    double s = -1.0;
    for (int k = 0; k < n_; ++k) s += a_[k] * std::norm(z[k]);
    return s;
}

RVec EllipsoidFunction::gradient(const CVec& z) const {
    RVec g(2 * n_);
    for (int k = 0; k < n_; ++k) {
        g[2 * k] = 2 * a_[k] * z[k].real();
        g[2 * k + 1] = 2 * a_[k] * z[k].imag();
    }
    return g;
}

RMat EllipsoidFunction::real_hessian(const CVec&) const {
    RMat H = RMat::Zero(2 * n_, 2 * n_);
    for (int k = 0; k < n_; ++k) {
        H(2 * k, 2 * k) = 2 * a_[k];
        H(2 * k + 1, 2 * k + 1) = 2 * a_[k];
    }
    return H;
}

double EllipsoidFunction::tubular_cap() const {
    return 1.0 / std::sqrt(*std::max_element(a_.begin(), a_.end()));
}

RVec EllipsoidFunction::box_lo() const {
    RVec v(2 * n_);
    for (int k = 0; k < n_; ++k) v[2 * k] = v[2 * k + 1] = -1.0 / std::sqrt(a_[k]);
    return v;
}

RVec EllipsoidFunction::box_hi() const { return -box_lo(); }

ImplicitFunction::ImplicitFunction(int n, std::function<double(const CVec&)> f, double cap, double box_half_width)
    : DefiningFunction(n), f_(std::move(f)), cap_(cap), half_(box_half_width) {}

RVec ImplicitFunction::box_lo() const { return RVec::Constant(2 * n_, -half_); }
RVec ImplicitFunction::box_hi() const { return RVec::Constant(2 * n_, half_); }

std::unique_ptr<DefiningFunction> make_domain(const std::string& name, const std::vector<double>& params) {
    if (name == "ball") {
        const int n = params.empty() ? 2 : static_cast<int>(params[0]);
        const double R = params.size() > 1 ? params[1] : 1.0;
        return std::make_unique<BallFunction>(n, R);
    }
    if (name == "ellipsoid") return std::make_unique<EllipsoidFunction>(params);
    throw Error(ErrorCode::InvalidArgument, "unknown domain '" + name + "'");
}

// ---------------------------------------------------------------- projection

namespace {

using SysVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxDim + 1, 1>;
using SysMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2 * kMaxDim + 1, 2 * kMaxDim + 1>;

struct NewtonResult {
    bool converged = false;
    RVec p;
    double lambda = 0.0;
    int iterations = 0;
};

SysVec lagrange_residual(const DefiningFunction& phi, const RVec& x, const RVec& p, double lambda, const RVec& g) {
    const Eigen::Index m = x.size();
    SysVec F(m + 1);
    F.head(m) = p + lambda * g - x;
    F[m] = phi.value(to_complex(p));
    return F;
}

// Newton on p + lambda grad phi(p) = x, phi(p) = 0.
NewtonResult lagrange_newton(const DefiningFunction& phi, const RVec& x, RVec p) {
    NewtonResult out;
    const Eigen::Index m = x.size();
    RVec g = phi.gradient(to_complex(p));
    double gg = g.squaredNorm();
    if (gg == 0.0) return out;
    double lambda = (x - p).dot(g) / gg;
    const double scale = std::max(1.0, (x - p).norm());
    for (int it = 0; it < 100; ++it) {
        out.iterations = it + 1;
        SysVec F = lagrange_residual(phi, x, p, lambda, g);
        const double fn = F.norm();
        if (std::abs(F[m]) < 1e-13 && F.head(m).norm() < 1e-13 * scale) {
            out.converged = true;
            break;
        }
        const RMat H = phi.real_hessian(to_complex(p));
        SysMat J = SysMat::Zero(m + 1, m + 1);
        J.topLeftCorner(m, m) = RMat::Identity(m, m) + lambda * H;
        J.topRightCorner(m, 1) = g;
        J.bottomLeftCorner(1, m) = g.transpose();
        SysVec step = J.fullPivLu().solve(-F);
        if (!step.allFinite()) return out;
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            RVec pn = p + t * step.head(m);
            const double ln = lambda + t * step[m];
            RVec gn = phi.gradient(to_complex(pn));
            SysVec Fn = lagrange_residual(phi, x, pn, ln, gn);
            if (Fn.norm() < (1.0 - 1e-4 * t) * fn || Fn.norm() < 1e-14 * scale) {
                p = pn;
                lambda = ln;
                g = gn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // Stalled at round-off level counts as converged.
            if (std::abs(F[m]) < 1e-12 && F.head(m).norm() < 1e-12 * scale) out.converged = true;
            break;
        }
    }
    out.p = p;
    out.lambda = lambda;
    return out;
}

// Smallest eigenvalue of (I + lambda H) restricted to the tangent space at p.
double focal_margin(const DefiningFunction& phi, const RVec& p, double lambda) {
    const RVec g = phi.gradient(to_complex(p));
    const Eigen::Index m = g.size();
    const RVec u = g.normalized();
    RMat Pt = RMat::Identity(m, m) - u * u.transpose();
    RMat M = Pt * (RMat::Identity(m, m) + lambda * phi.real_hessian(to_complex(p))) * Pt;
    M = 0.5 * (M + M.transpose());
    // Add the normal direction with unit weight so it never determines the minimum.
    M += u * u.transpose();
    Eigen::SelfAdjointEigenSolver<RMat> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

RVec gradient_flow_init(const DefiningFunction& phi, const RVec& x) {
    RVec p = x;
    for (int k = 0; k < 60; ++k) {
        const CVec pc = to_complex(p);
        const double f = phi.value(pc);
        if (std::abs(f) < 1e-14) break;
        const RVec g = phi.gradient(pc);
        const double gg = g.squaredNorm();
        if (gg == 0.0) break;
        p -= (f / gg) * g;
    }
    return p;
}

enum class ProjectionUse { Project, SignedDistance };

Projection solve_projection(const DefiningFunction& phi, const CVec& xc, ProjectionUse use) {
    Projection out;
    const double fx = phi.value(xc);
    CVec exact;
    if (phi.exact_projection(xc, exact)) {
        out.point = exact;
        out.distance = (xc - exact).norm();
        out.iterations = 0;
    } else {
        const RVec x = to_real(xc);
        NewtonResult nr = lagrange_newton(phi, x, gradient_flow_init(phi, x));
        if (!nr.converged) throw Error(ErrorCode::NoConvergence, "projection Newton did not converge");
        const double dist = (x - nr.p).norm();
        // x - p = lambda grad: interior points need lambda < 0, exterior lambda > 0.
        if (dist > 1e-13 && ((fx < 0 && nr.lambda > 0) || (fx > 0 && nr.lambda < 0)))
            throw Error(ErrorCode::NoConvergence, "projection converged to a far critical point");
        const double margin = focal_margin(phi, nr.p, nr.lambda);
        if (margin <= 1e-9) {
            if (use == ProjectionUse::Project)
                throw Error(ErrorCode::OutsideTubular, "point beyond the focal distance");
            throw Error(ErrorCode::NoConvergence, "projection is not a local minimum of distance");
        }
        out.point = to_complex(nr.p);
        out.distance = dist;
        out.iterations = nr.iterations;
    }
    out.signed_distance = fx < 0 ? -out.distance : (fx > 0 ? out.distance : 0.0);
    if (use == ProjectionUse::Project && out.distance >= phi.tubular_cap())
        throw Error(ErrorCode::OutsideTubular, "distance to boundary exceeds tubular radius");
    return out;
}

}  // namespace

Projection project_to_boundary(const DefiningFunction& phi, const CVec& x) {
    return solve_projection(phi, x, ProjectionUse::Project);
}

double signed_distance(const DefiningFunction& phi, const CVec& x) {
    return solve_projection(phi, x, ProjectionUse::SignedDistance).signed_distance;
}

double height(const DefiningFunction& phi, const CVec& x) {
    if (phi.value(x) >= 0.0) throw Error(ErrorCode::NotInDomain, "height requires an interior point");
    return std::sqrt(-signed_distance(phi, x));
}

// ---------------------------------------------------------------- frames

CVec complex_normal(const DefiningFunction& phi, const CVec& x) {
    RVec g = phi.gradient(x);
    const double gn = g.norm();
    if (gn == 0.0) throw Error(ErrorCode::DegenerateBoundary, "vanishing gradient");
    return to_complex(g / gn);
}

LeviData levi_data(const DefiningFunction& phi, const CVec& p) {
    LeviData L;
    RVec g = phi.gradient(p);
    L.grad_norm = g.norm();
    if (L.grad_norm == 0.0) throw Error(ErrorCode::DegenerateBoundary, "vanishing gradient");
    L.nu = to_complex(g / L.grad_norm);
    L.levi = phi.complex_hessian(p) / L.grad_norm;
    return L;
}

double BoundaryFrame::levi_form(const CVec& Z) const {
    return (Z.transpose() * levi * Z.conjugate())(0, 0).real();
}

BoundaryFrame boundary_frame(const DefiningFunction& phi, const CVec& p) {
    if (std::abs(phi.value(p)) >= 1e-10)
        throw Error(ErrorCode::InvalidArgument, "boundary_frame requires |phi(p)| < 1e-10");
    const int n = phi.dimension();
    BoundaryFrame F;
    LeviData L = levi_data(phi, p);
    F.point = p;
    F.complex_normal = L.nu;
    F.normal = to_real(L.nu);
    F.grad_norm = L.grad_norm;
    F.levi = L.levi;
    F.P_N = L.nu * L.nu.adjoint();
    F.P_H = CMat::Identity(n, n) - F.P_N;

    // Gram-Schmidt over standard basis vectors, least aligned with nu first.
    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(L.nu[a]) < std::abs(L.nu[b]); });
    F.horizontal_basis = CMat::Zero(n, n - 1);
    int filled = 0;
    for (int k : order) {
        if (filled == n - 1) break;
        CVec v = CVec::Zero(n);
        v[k] = 1.0;
        v -= L.nu * herm(v, L.nu);
        for (int j = 0; j < filled; ++j) {
            CVec bj = F.horizontal_basis.col(j);
            v -= bj * herm(v, bj);
        }
        const double vn = v.norm();
        if (vn < 1e-8) continue;
        F.horizontal_basis.col(filled++) = v / vn;
    }
    const CMat& B = F.horizontal_basis;
    F.levi_H = B.transpose() * F.levi * B.conjugate();
    F.levi_H = 0.5 * (F.levi_H + F.levi_H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> es(F.levi_H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-12)
        throw Error(ErrorCode::NotStrictlyPseudoconvex, "Levi form not positive definite on H_p");
    return F;
}

// ---------------------------------------------------------------- sampling

CVec random_complex_gaussian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    CVec z(n);
    for (int k = 0; k < n; ++k) {
        const double re = N(rng);
        const double im = N(rng);
        z[k] = cplx(re, im);
    }
    return z;
}

CVec snap_to_boundary(const DefiningFunction& phi, const CVec& x) {
    CVec p = x;
    for (int k = 0; k < 30; ++k) {
        const double f = phi.value(p);
        if (std::abs(f) <= 2e-16) break;
        const RVec g = phi.gradient(p);
        const double gg = g.squaredNorm();
        if (gg == 0.0) break;
        CVec next = p - to_complex((f / gg) * g);
        if (next == p) break;
        p = next;
    }
    return p;
}

CVec ray_to_boundary(const DefiningFunction& phi, const CVec& dir) {
    const CVec c = phi.center();
    const CVec u = dir / dir.norm();
    double lo = 0.0;
    double hi = (phi.box_hi() - phi.box_lo()).norm() + 1.0;
    if (phi.value(c) >= 0) throw Error(ErrorCode::InvalidArgument, "domain center is not interior");
    for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (phi.value(c + mid * u) < 0) lo = mid;
        else hi = mid;
    }
    return snap_to_boundary(phi, c + (0.5 * (lo + hi)) * u);
}

CVec sample_boundary_point(const DefiningFunction& phi, std::mt19937_64& rng) {
    CVec g = random_complex_gaussian(phi.dimension(), rng);
    while (g.norm() < 1e-12) g = random_complex_gaussian(phi.dimension(), rng);
    return ray_to_boundary(phi, g);
}

// ---------------------------------------------------------------- tubular radius

TubularNeighborhood estimate_tubular_radius(const DefiningFunction& phi, int samples, std::uint64_t seed) {
    if (samples < 100) throw Error(ErrorCode::InvalidArgument, "estimate_tubular_radius needs >= 100 samples");
    std::mt19937_64 rng(seed);
    struct Probe {
        CVec p;
        CVec nu;
        std::vector<CVec> starts;
    };
    std::vector<Probe> probes;
    probes.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        Probe pr;
        pr.p = sample_boundary_point(phi, rng);
        pr.nu = complex_normal(phi, pr.p);
        for (int s = 0; s < 3; ++s) pr.starts.push_back(sample_boundary_point(phi, rng));
        probes.push_back(std::move(pr));
    }
    const double cap = phi.tubular_cap();

    auto admissible = [&](double delta) {
        if (delta >= cap) return false;
        for (const Probe& pr : probes) {
            const CVec x = pr.p - delta * pr.nu;
            try {
                Projection P = project_to_boundary(phi, x);
                if ((P.point - pr.p).norm() > 1e-8 || std::abs(P.distance - delta) > 1e-8) return false;
            } catch (const Error&) {
                return false;
            }
            const RVec xr = to_real(x);
            for (const CVec& s : pr.starts) {
                NewtonResult nr = lagrange_newton(phi, xr, to_real(s));
                if (!nr.converged) continue;
                if ((xr - nr.p).norm() < delta - 1e-10) return false;
            }
        }
        return true;
    };

    double hi = cap * (1.0 - 1e-9);
    if (admissible(hi)) return {hi, &phi};
    double lo = 0.0;
    double trial = hi;
    for (int k = 0; k < 40; ++k) {
        trial *= 0.5;
        if (admissible(trial)) {
            lo = trial;
            break;
        }
        hi = trial;
    }
    if (lo == 0.0) throw Error(ErrorCode::DegenerateBoundary, "no positive tubular radius found");
    for (int k = 0; k < 40; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (admissible(mid)) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-6 * lo) break;
    }
    return {lo, &phi};
}

}  // namespace visualmetrics
