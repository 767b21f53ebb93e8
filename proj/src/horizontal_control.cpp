// Horizontal curves driven by piecewise-constant controls, and the constrained
// minimum-energy solver behind cc_distance.

#include "visualmetrics/boundary_cc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace visualmetrics {

// ---------------------------------------------------------------- Heisenberg model

CMat levi_orthonormal_basis(const BoundaryFrame& F) {
    Eigen::SelfAdjointEigenSolver<CMat> es(F.levi_H);
    const CMat U = es.eigenvectors();
    const auto lam = es.eigenvalues();
    CMat Dinv = CMat::Zero(lam.size(), lam.size());
    for (Eigen::Index j = 0; j < lam.size(); ++j) Dinv(j, j) = 1.0 / std::sqrt(lam[j]);
    return F.horizontal_basis * U.conjugate() * Dinv;
}

HeisenbergCoords heisenberg_coordinates(const DefiningFunction& phi, const CVec& p, const CVec& q) {
    const BoundaryFrame F = boundary_frame(phi, p);
    const CMat E = levi_orthonormal_basis(F);
    const CVec zeta = q - p;
    const CVec zH = F.P_H * zeta;
    HeisenbergCoords hc;
    hc.W = CVec(E.cols());
    for (Eigen::Index j = 0; j < E.cols(); ++j)
        hc.W[j] = (zH.transpose() * F.levi * E.col(j).conjugate())(0, 0);
    const CMat S = phi.complex_hessian_bar(p);
    const cplx quad = (zH.transpose() * S.conjugate() * zH)(0, 0);
    hc.V = herm(zeta, F.complex_normal).imag() + quad.imag() / F.grad_norm;
    return hc;
}

namespace {

// V / |W|^2 along the model geodesic with rate omega.
double mu_of_omega(double w) {
    if (std::abs(w) < 1e-4) return w / 3.0 + w * w * w / 180.0;
    const double s = std::sin(0.5 * w);
    return (w - std::sin(w)) / (2.0 * s * s);
}

}  // namespace

HeisenbergGeodesic heisenberg_geodesic(const CVec& W, double V) {
    HeisenbergGeodesic g;
    g.a = CVec::Zero(W.size());
    const double w2 = W.squaredNorm();
    if (w2 == 0.0 && V == 0.0) return g;
    if (w2 == 0.0 || std::abs(V) > 1e12 * w2) {
        g.omega = V > 0 ? 2 * M_PI : -2 * M_PI;
        const double len = std::sqrt(M_PI * std::abs(V));
        CVec c = CVec::Zero(W.size());
        if (w2 > 0.0) c = W / std::sqrt(w2);
        else c[0] = 1.0;
        g.a = len * c;
        g.length = len;
        return g;
    }
    const double target = V / w2;
    double lo = -2 * M_PI, hi = 2 * M_PI;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mu_of_omega(mid) < target) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-15) break;
    }
    g.omega = 0.5 * (lo + hi);
    cplx factor = 1.0;
    if (std::abs(g.omega) > 1e-12) factor = cplx(0.0, g.omega) / (1.0 - std::exp(cplx(0.0, -g.omega)));
    g.a = W * factor;
    g.length = g.a.norm();
    return g;
}

double heisenberg_distance(const CVec& W, double V) { return heisenberg_geodesic(W, V).length; }

// ---------------------------------------------------------------- flow

namespace {

inline CVec horizontal_field(const DefiningFunction& phi, const CVec& x, const CVec& u) {
    const CVec nu = complex_normal(phi, x);
    return u - nu * herm(u, nu);
}

CVec segment_map(const DefiningFunction& phi, CVec x, const CVec& u, double dt, int substeps) {
    const double h = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
        const CVec k1 = horizontal_field(phi, x, u);
        const CVec k2 = horizontal_field(phi, x + (0.5 * h) * k1, u);
        const CVec k3 = horizontal_field(phi, x + (0.5 * h) * k2, u);
        const CVec k4 = horizontal_field(phi, x + h * k3, u);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return snap_to_boundary(phi, x);
}

struct QuadForm {
    double full = 0.0;        // L(P_H u) + |P_N u|^2
    double horizontal = 0.0;  // L(P_H u)
};

QuadForm control_cost(const DefiningFunction& phi, const CVec& x, const CVec& u) {
    const LeviData L = levi_data(phi, x);
    const cplx c = herm(u, L.nu);
    const CVec uH = u - L.nu * c;
    QuadForm q;
    q.horizontal = std::max(0.0, (uH.transpose() * L.levi * uH.conjugate())(0, 0).real());
    q.full = q.horizontal + std::norm(c);
    return q;
}

// Real matrix of u -> control_cost(x,u).full, and its gradient in u.
RMat control_cost_matrix(const DefiningFunction& phi, const CVec& x, int m) {
    const LeviData L = levi_data(phi, x);
    auto Q = [&](const RVec& v) {
        const CVec u = to_complex(v);
        const cplx c = herm(u, L.nu);
        const CVec uH = u - L.nu * c;
        return (uH.transpose() * L.levi * uH.conjugate())(0, 0).real() + std::norm(c);
    };
    RMat W(m, m);
    std::vector<double> diag(m);
    for (int a = 0; a < m; ++a) {
        RVec e = RVec::Zero(m);
        e[a] = 1.0;
        diag[a] = Q(e);
        W(a, a) = diag[a];
    }
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            RVec e = RVec::Zero(m);
            e[a] = 1.0;
            e[b] = 1.0;
            W(a, b) = W(b, a) = 0.5 * (Q(e) - diag[a] - diag[b]);
        }
    return W;
}

RVec cost_grad_state(const DefiningFunction& phi, const CVec& x, const CVec& u, int m) {
    RVec g(m);
    const RVec xr = to_real(x);
    constexpr double h = 1e-6;
    for (int a = 0; a < m; ++a) {
        RVec xp = xr, xm = xr;
        xp[a] += h;
        xm[a] -= h;
        g[a] = (control_cost(phi, to_complex(xp), u).full - control_cost(phi, to_complex(xm), u).full) / (2 * h);
    }
    return g;
}

struct Forward {
    std::vector<CVec> states;
    double energy = 0.0;
    double length = 0.0;
    bool ok = true;
};

Forward run_forward(const DefiningFunction& phi, const HorizontalControls& c, int substeps) {
    Forward f;
    const int M = static_cast<int>(c.u.size());
    const double dt = 1.0 / M;
    f.states.resize(M + 1);
    f.states[0] = c.start;
    for (int i = 0; i < M; ++i) {
        f.states[i + 1] = segment_map(phi, f.states[i], c.u[i], dt, substeps);
        const QuadForm q0 = control_cost(phi, f.states[i], c.u[i]);
        const QuadForm q1 = control_cost(phi, f.states[i + 1], c.u[i]);
        f.energy += dt * 0.5 * (q0.full + q1.full);
        f.length += dt * 0.5 * (std::sqrt(q0.horizontal) + std::sqrt(q1.horizontal));
    }
    for (const CVec& s : f.states)
        if (!s.allFinite()) f.ok = false;
    return f;
}

// Orthonormal basis (columns) of the real tangent space at a boundary point.
Eigen::MatrixXd tangent_basis(const DefiningFunction& phi, const CVec& q) {
    const RVec n = to_real(complex_normal(phi, q));
    const int m = static_cast<int>(n.size());
    Eigen::MatrixXd A(m, m);
    A.col(0) = n;
    int col = 1;
    for (int k = 0; k < m && col < m; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[k] = 1.0;
        for (int j = 0; j < col; ++j) e -= A.col(j).dot(e) * A.col(j);
        if (e.norm() < 1e-6) continue;
        A.col(col++) = e.normalized();
    }
    return A.rightCols(m - 1);
}

struct SqpResult {
    bool converged = false;
    HorizontalControls controls;
    Forward forward;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
};

SqpResult solve_sqp(const DefiningFunction& phi, HorizontalControls c, const CVec& q, const CcOptions& opts,
                    double tol_r) {
    SqpResult out;
    const int n = phi.dimension();
    const int m = 2 * n;
    const int M = static_cast<int>(c.u.size());
    const double dt = 1.0 / M;
    const int substeps = 1;
    const Eigen::MatrixXd T = tangent_basis(phi, q);
    double sigma = 0.0;
    double prev_energy = 0.0;
    double prev_r = 0.0;
    int slow = 0;
    bool restore = false;
    Eigen::MatrixXd H, Jd_prev;
    Eigen::VectorXd gd_prev, mu_prev, s_prev;
    bool have_step = false;

    Forward fw = run_forward(phi, c, substeps);
    if (!fw.ok) return out;
    for (int it = 0; it < opts.max_iter; ++it) {
        out.iterations = it + 1;
        const Eigen::VectorXd r = to_real(q - fw.states[M]).cast<double>();
        const double rnorm = r.norm();

        std::vector<RMat> A(M), B(M), Hblk(M);
        std::vector<RVec> gu(M);
        std::vector<RVec> dstart(M), dend(M);
        for (int i = 0; i < M; ++i) {
            const CVec& x = fw.states[i];
            const RVec xr = to_real(x);
            const RVec ur = to_real(c.u[i]);
            A[i].resize(m, m);
            B[i].resize(m, m);
            constexpr double hx = 1e-7;
            const double hu = 1e-7 * std::max(1.0, ur.norm());
            for (int a = 0; a < m; ++a) {
                RVec xp = xr, xm = xr;
                xp[a] += hx;
                xm[a] -= hx;
                A[i].col(a) = (to_real(segment_map(phi, to_complex(xp), c.u[i], dt, substeps)) -
                               to_real(segment_map(phi, to_complex(xm), c.u[i], dt, substeps))) / (2 * hx);
                RVec up = ur, um = ur;
                up[a] += hu;
                um[a] -= hu;
                B[i].col(a) = (to_real(segment_map(phi, x, to_complex(up), dt, substeps)) -
                               to_real(segment_map(phi, x, to_complex(um), dt, substeps))) / (2 * hu);
            }
            const RMat W0 = control_cost_matrix(phi, fw.states[i], m);
            const RMat W1 = control_cost_matrix(phi, fw.states[i + 1], m);
            const RMat Wbar = 0.5 * (W0 + W1);
            gu[i] = dt * Wbar * ur;  // d/du of dt*(Q0+Q1)/2 with Q = u^T W u
            Hblk[i] = dt * Wbar;
            dstart[i] = 0.5 * dt * cost_grad_state(phi, fw.states[i], c.u[i], m);
            dend[i] = 0.5 * dt * cost_grad_state(phi, fw.states[i + 1], c.u[i], m);
        }
        // Adjoint pass for the energy gradient.
        RVec adj = RVec::Zero(m);
        std::vector<RVec> g(M);
        for (int i = M - 1; i >= 0; --i) {
            const RVec w = dend[i] + adj;
            g[i] = gu[i] + B[i].transpose() * w;
            adj = dstart[i] + A[i].transpose() * w;
        }
        // Endpoint Jacobian blocks projected to the tangent space at q.
        std::vector<Eigen::MatrixXd> Jt(M);
        RMat Phi = RMat::Identity(m, m);
        for (int i = M - 1; i >= 0; --i) {
            Jt[i] = T.transpose() * (Phi * B[i]).cast<double>();
            Phi = Phi * A[i];
        }
        // In restoration mode the energy gradient is dropped: min-norm Newton steps on the endpoint only.
        if (restore)
            for (RVec& gi : g) gi.setZero();
        const int N = M * m;
        Eigen::MatrixXd Jd(m - 1, N);
        Eigen::VectorXd gd(N);
        for (int i = 0; i < M; ++i) {
            Jd.middleCols(i * m, m) = Jt[i];
            gd.segment(i * m, m) = g[i].cast<double>();
        }
        // Lagrangian Hessian: block-diagonal cost at the start, damped BFGS afterwards.
        if (H.size() == 0) {
            H = Eigen::MatrixXd::Zero(N, N);
            for (int i = 0; i < M; ++i) H.block(i * m, i * m, m, m) = Hblk[i].cast<double>();
        } else if (have_step) {
            Eigen::VectorXd y = (gd - Jd.transpose() * mu_prev) - (gd_prev - Jd_prev.transpose() * mu_prev);
            const Eigen::VectorXd Hs = H * s_prev;
            const double sHs = s_prev.dot(Hs);
            double sy = s_prev.dot(y);
            if (sHs > 0.0) {
                if (sy < 0.2 * sHs) {
                    const double theta = 0.8 * sHs / (sHs - sy);
                    y = theta * y + (1.0 - theta) * Hs;
                    sy = s_prev.dot(y);
                }
                if (sy > 0.0) H += y * y.transpose() / sy - Hs * Hs.transpose() / sHs;
            }
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(H);
        const Eigen::MatrixXd HJ = llt.solve(Jd.transpose());
        const Eigen::VectorXd Hg = llt.solve(gd);
        const Eigen::VectorXd rT = T.transpose() * r;
        const Eigen::MatrixXd S = Jd * HJ;
        const Eigen::VectorXd mu = S.ldlt().solve(rT + Jd * Hg);
        const Eigen::VectorXd dd = HJ * mu - Hg;
        std::vector<RVec> delta(M);
        double dmax = 0.0, umax = 0.0, slope = 0.0;
        for (int i = 0; i < M; ++i) {
            delta[i] = RVec(dd.segment(i * m, m));
            dmax = std::max(dmax, delta[i].cwiseAbs().maxCoeff());
            umax = std::max(umax, to_real(c.u[i]).cwiseAbs().maxCoeff());
            slope += g[i].dot(delta[i]);
        }
        gd_prev = gd;
        Jd_prev = Jd;
        mu_prev = mu;
        have_step = false;
        out.residual = rnorm;
        const bool stalled = it > 0 && std::abs(prev_energy - fw.energy) <= 1e-14 * fw.energy;
        if (rnorm < tol_r && (restore || dmax < 1e-7 * std::max(1e-3, umax) || stalled)) {
            out.converged = true;
            break;
        }
        // Flat valleys near the conjugate locus: energy settled while feasibility creeps.
        if (!restore && it > 0) {
            slow = rnorm > 0.9 * prev_r && std::abs(prev_energy - fw.energy) < 1e-6 * fw.energy ? slow + 1 : 0;
            if (slow >= 5) {
                restore = true;
                continue;
            }
        }
        prev_r = rnorm;
        sigma = std::max(sigma, 2.0 * mu.cwiseAbs().maxCoeff() + 1e-12);
        const double merit0 = fw.energy + sigma * rnorm;
        const double D = slope - sigma * rnorm;
        double alpha = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k) {
            HorizontalControls trial = c;
            for (int i = 0; i < M; ++i) trial.u[i] += to_complex(alpha * delta[i]);
            Forward ft = run_forward(phi, trial, substeps);
            if (ft.ok) {
                const double rt = (q - ft.states[M]).norm();
                const double merit = ft.energy + sigma * rt;
                const bool ok = restore ? rt <= (1.0 - 1e-4 * alpha) * rnorm
                                        : merit <= merit0 + 1e-4 * alpha * std::min(D, 0.0) ||
                                              (rt < tol_r && merit <= merit0 + 1e-14);
                if (ok) {
                    s_prev.resize(M * m);
                    for (int i = 0; i < M; ++i) s_prev.segment(i * m, m) = alpha * delta[i].cast<double>();
                    have_step = true;
                    c = trial;
                    prev_energy = fw.energy;
                    fw = ft;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!restore && rnorm >= 10 * tol_r) {
                restore = true;
                continue;
            }
            out.converged = rnorm < 10 * tol_r;
            break;
        }
    }
    if (!out.converged) {
        const double rfinal = (q - fw.states[M]).norm();
        if (rfinal < tol_r) out.converged = true;
        out.residual = rfinal;
    }
    out.controls = c;
    out.forward = fw;
    return out;
}

bool lex_less(const CVec& a, const CVec& b) {
    const RVec x = to_real(a), y = to_real(b);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < y[i]) return true;
        if (x[i] > y[i]) return false;
    }
    return false;
}

// Waypoints along the boundary image of the chord from p to q (radial projection from the center).
std::vector<CVec> radial_waypoints(const DefiningFunction& phi, const CVec& p, const CVec& q, double step) {
    const CVec c = phi.center();
    const CVec dp = p - c, dq = q - c;
    std::vector<CVec> legs_dirs{dp};
    // Detour when the chord passes close to the center.
    double min_norm = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 64; ++k) {
        const double s = k / 64.0;
        min_norm = std::min(min_norm, ((1 - s) * dp + s * dq).norm());
    }
    if (min_norm < 0.3 * std::min(dp.norm(), dq.norm())) {
        const RVec a = to_real(dp).normalized();
        RVec b = to_real(dq);
        b -= b.dot(a) * a;
        RVec w;
        for (Eigen::Index k = 0; k < a.size(); ++k) {
            RVec e = RVec::Zero(a.size());
            e[k] = 1.0;
            e -= e.dot(a) * a;
            if (b.norm() > 1e-8) e -= e.dot(b.normalized()) * b.normalized();
            if (e.norm() > 0.3) {
                w = e.normalized();
                break;
            }
        }
        legs_dirs.push_back(to_complex(w) * dp.norm());
    }
    legs_dirs.push_back(dq);
    std::vector<CVec> pts;
    for (std::size_t l = 0; l + 1 < legs_dirs.size(); ++l) {
        const CVec a = ray_to_boundary(phi, legs_dirs[l]);
        const CVec b = ray_to_boundary(phi, legs_dirs[l + 1]);
        const int K = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step)));
        for (int k = 1; k <= K; ++k) {
            const double s = static_cast<double>(k) / K;
            pts.push_back(ray_to_boundary(phi, (1 - s) * legs_dirs[l] + s * legs_dirs[l + 1]));
        }
    }
    pts.back() = q;
    return pts;
}

std::vector<CVec> resample_waypoints(const std::vector<CVec>& path, const CVec& q, double step) {
    std::vector<CVec> pts;
    double acc = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        acc += (path[i] - path[i - 1]).norm();
        if (acc >= step && i + 1 < path.size()) {
            pts.push_back(path[i]);
            acc = 0.0;
        }
    }
    pts.push_back(q);
    return pts;
}

HorizontalControls direct_init(const DefiningFunction& phi, const CVec& p, const CVec& q, int M) {
    const HeisenbergCoords hc = heisenberg_coordinates(phi, p, q);
    const HeisenbergGeodesic g = heisenberg_geodesic(hc.W, hc.V);
    return heisenberg_controls(phi, p, g.a, g.omega, M);
}

bool continuation(const DefiningFunction& phi, const CVec& p, const std::vector<CVec>& targets, const CcOptions& opts,
                  double tol_r, SqpResult& out) {
    HorizontalControls c;
    bool have = false;
    int iters = 0;
    for (const CVec& t : targets) {
        if (!have) c = direct_init(phi, p, t, opts.segments);
        SqpResult r = solve_sqp(phi, c, t, opts, tol_r);
        iters += r.iterations;
        if (!r.converged) return false;
        c = r.controls;
        have = true;
        out = r;
    }
    out.iterations = iters;
    return have;
}

}  // namespace

FlowTrace horizontal_flow(const DefiningFunction& phi, const HorizontalControls& c, int substeps) {
    const Forward f = run_forward(phi, c, substeps);
    FlowTrace t;
    t.states = f.states;
    t.length = f.length;
    return t;
}

HorizontalControls heisenberg_controls(const DefiningFunction& phi, const CVec& p, const CVec& a, double omega,
                                       int segments) {
    const BoundaryFrame F = boundary_frame(phi, p);
    const CMat E = levi_orthonormal_basis(F);
    const CVec A = E * a;
    HorizontalControls c;
    c.start = p;
    c.u.resize(segments);
    const double dt = 1.0 / segments;
    const double x = 0.5 * omega * dt;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x;
    for (int i = 0; i < segments; ++i) {
        const double s = (i + 0.5) * dt;
        c.u[i] = A * (std::exp(cplx(0.0, -omega * s)) * sinc);
    }
    return c;
}

HorizontalControls reverse_controls(const HorizontalControls& c, const CVec& new_start) {
    HorizontalControls r;
    r.start = new_start;
    r.u.assign(c.u.rbegin(), c.u.rend());
    for (CVec& v : r.u) v = -v;
    return r;
}

CVec vertical_point(const DefiningFunction& phi, const CVec& p, double t) {
    const CVec nu = complex_normal(phi, p);
    return project_to_boundary(phi, p + cplx(0.0, t) * nu).point;
}

CcResult refine_horizontal(const DefiningFunction& phi, const HorizontalControls& init, const CVec& q,
                           const CcOptions& opts) {
    const double tol_r = opts.tol * std::max(1.0, (q - init.start).norm());
    SqpResult r = solve_sqp(phi, init, q, opts, tol_r);
    if (!r.converged) throw Error(ErrorCode::NoConvergence, "horizontal control refinement did not converge");
    CcResult res;
    res.distance = r.forward.length;
    res.controls = r.controls;
    res.curve = r.forward.states;
    res.iterations = r.iterations;
    res.method = "refine";
    return res;
}

CcResult cc_distance(const DefiningFunction& phi, const CVec& p, const CVec& q, const CcOptions& opts) {
    if (std::abs(phi.value(p)) > 1e-8 || std::abs(phi.value(q)) > 1e-8)
        throw Error(ErrorCode::InvalidArgument, "cc_distance needs boundary points");
    CcResult best;
    const double sep = (q - p).norm();
    if (sep == 0.0) {
        best.method = "identical";
        best.curve = {p};
        return best;
    }
    const double tol_r = opts.tol * std::max(1.0, sep);
    std::vector<CVec> graph_nodes;
    if (opts.graph) {
        const BoundaryGraph& G = *opts.graph;
        for (std::size_t k = 0; k < G.k_values.size(); ++k) {
            GraphPath gp = graph_shortest_path(phi, G, p, q, static_cast<int>(k));
            best.graph_dk.push_back(gp.length);
            if (k + 1 == G.k_values.size()) graph_nodes = gp.nodes;
        }
        best.k_max = G.k_values.empty() ? 0.0 : G.k_values.back();
        best.graph_vertices = static_cast<int>(G.vertices.size());
    }

    bool found = false;
    auto consider = [&](const SqpResult& r, const char* method) {
        if (!r.converged) return;
        if (!found || r.forward.length < best.distance) {
            best.distance = r.forward.length;
            best.controls = r.controls;
            best.curve = r.forward.states;
            best.method = method;
            found = true;
        }
        best.iterations += r.iterations;
    };

    if (opts.warm_start) {
        HorizontalControls w = *opts.warm_start;
        w.start = p;
        if (static_cast<int>(w.u.size()) == opts.segments) consider(solve_sqp(phi, w, q, opts, tol_r), "warm");
    }
    if (!found) {
        if (sep < opts.direct_threshold) consider(solve_sqp(phi, direct_init(phi, p, q, opts.segments), q, opts, tol_r), "direct");
        if (sep >= opts.continuation_threshold) {
            SqpResult r;
            if (continuation(phi, p, radial_waypoints(phi, p, q, 0.15), opts, tol_r, r)) consider(r, "continuation");
            if (!graph_nodes.empty()) {
                SqpResult rg;
                if (continuation(phi, p, resample_waypoints(graph_nodes, q, 0.15), opts, tol_r, rg))
                    consider(rg, "graph-continuation");
            }
        }
    }
    if (!found) throw Error(ErrorCode::NoConvergence, "no horizontal curve reached the target");
    return best;
}

// ---------------------------------------------------------------- caching solver

CcSolver::CcSolver(const DefiningFunction& phi, CcOptions opts) : phi_(phi), opts_(opts) {}

double CcSolver::distance(const CVec& p, const CVec& q) { return solve(p, q).distance; }

const CcResult& CcSolver::solve(const CVec& p, const CVec& q) {
    const bool swap = lex_less(q, p);
    const CVec a = swap ? q : p;
    const CVec b = swap ? p : q;
    for (const Entry& e : cache_)
        if (e.a == a && e.b == b) return e.res;
    const double sep = (b - a).norm();
    CcOptions o = opts_;
    HorizontalControls warm;
    if (sep >= opts_.direct_threshold) {
        double best = 0.25 * sep;
        bool have = false;
        for (const Entry& e : cache_) {
            if (e.res.controls.u.empty()) continue;
            const double fwd = std::max((e.a - a).norm(), (e.b - b).norm());
            const double rev = std::max((e.b - a).norm(), (e.a - b).norm());
            if (fwd < best) {
                best = fwd;
                warm = e.res.controls;
                have = true;
            }
            if (rev < best) {
                best = rev;
                warm = reverse_controls(e.res.controls, a);
                have = true;
            }
        }
        if (have) o.warm_start = &warm;
    }
    CcResult res;
    try {
        res = cc_distance(phi_, a, b, o);
    } catch (const Error&) {
        if (!o.warm_start) throw;
        o.warm_start = nullptr;
        res = cc_distance(phi_, a, b, o);
    }
    cache_.push_back({a, b, std::move(res)});
    return cache_.back().res;
}

}  // namespace visualmetrics
