#include "visualmetrics/invariant_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace visualmetrics {

PointFrame point_frame(const DefiningFunction& phi, const CVec& x) {
    if (phi.value(x) >= 0.0) throw Error(ErrorCode::NotInDomain, "point is not interior");
    Projection P = project_to_boundary(phi, x);
    PointFrame F;
    F.foot = P.point;
    F.depth = P.distance;
    F.levi = levi_data(phi, P.point);
    return F;
}

namespace {

struct Envelope {
    double scale;
    double levi_weight;
};

Envelope envelope(const FinslerModel& M, double d) {
    switch (M.mode) {
        case FinslerMode::LowerEnvelope: return {1.0 - M.C * std::sqrt(d), 1.0 - M.eps_bar};
        case FinslerMode::UpperEnvelope: return {1.0 + M.C * std::sqrt(d), 1.0 + M.eps_bar};
        case FinslerMode::ModelCenter: break;
    }
    return {1.0, 1.0};
}

double quadratic_part(const PointFrame& F, const Envelope& e, const CVec& Z, cplx& c, CVec& ZH, double& L) {
    const double d = F.depth;
    c = herm(Z, F.levi.nu);
    ZH = Z - F.levi.nu * c;
    L = (ZH.transpose() * F.levi.levi * ZH.conjugate())(0, 0).real();
    return std::norm(c) / (4 * d * d) + e.levi_weight * L / d;
}

}  // namespace

double finsler_norm(const FinslerModel& M, const PointFrame& F, const CVec& Z) {
    const Envelope e = envelope(M, F.depth);
    cplx c;
    CVec ZH;
    double L;
    const double Q = quadratic_part(F, e, Z, c, ZH, L);
    return e.scale * std::sqrt(std::max(Q, 0.0));
}

double finsler_norm(const FinslerModel& M, const CVec& x, const CVec& Z) {
    return finsler_norm(M, point_frame(*M.phi, x), Z);
}

CVec finsler_norm_gradient(const FinslerModel& M, const PointFrame& F, const CVec& Z) {
    const Envelope e = envelope(M, F.depth);
    cplx c;
    CVec ZH;
    double L;
    const double Q = quadratic_part(F, e, Z, c, ZH, L);
    if (Q <= 0.0) return CVec::Zero(Z.size());
    const double d = F.depth;
    const CVec PH_grad = [&] {
        CVec w = F.levi.levi.conjugate() * ZH;
        return CVec(w - F.levi.nu * herm(w, F.levi.nu));
    }();
    CVec gradQ = F.levi.nu * (c * (2.0 / (4 * d * d))) + PH_grad * (2.0 * e.levi_weight / d);
    return gradQ * (e.scale / (2.0 * std::sqrt(Q)));
}

// ---------------------------------------------------------------- curves

DiscreteCurve DiscreteCurve::from_nodes(std::vector<CVec> nodes) {
    DiscreteCurve c;
    c.nodes = std::move(nodes);
    const std::size_t N = c.nodes.size();
    c.t.resize(N);
    for (std::size_t i = 0; i < N; ++i) c.t[i] = N > 1 ? static_cast<double>(i) / static_cast<double>(N - 1) : 0.0;
    return c;
}

DiscreteCurve DiscreteCurve::segment(const CVec& a, const CVec& b, int segments) {
    std::vector<CVec> nodes;
    nodes.reserve(segments + 1);
    for (int i = 0; i <= segments; ++i) {
        const double s = static_cast<double>(i) / segments;
        nodes.push_back((1.0 - s) * a + s * b);
    }
    return from_nodes(std::move(nodes));
}

DiscreteCurve DiscreteCurve::refined() const {
    DiscreteCurve out;
    if (nodes.empty()) return out;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        out.nodes.push_back(nodes[i]);
        out.t.push_back(t[i]);
        out.nodes.push_back(0.5 * (nodes[i] + nodes[i + 1]));
        out.t.push_back(0.5 * (t[i] + t[i + 1]));
    }
    out.nodes.push_back(nodes.back());
    out.t.push_back(t.back());
    return out;
}

double curve_length(const FinslerModel& M, const DiscreteCurve& gamma) {
    for (const CVec& x : gamma.nodes) project_to_boundary(*M.phi, x);
    double L = 0.0;
    for (std::size_t i = 0; i + 1 < gamma.nodes.size(); ++i) {
        const CVec dx = gamma.nodes[i + 1] - gamma.nodes[i];
        if (dx.norm() == 0.0) continue;
        L += finsler_norm(M, 0.5 * (gamma.nodes[i] + gamma.nodes[i + 1]), dx);
    }
    return L;
}

// ---------------------------------------------------------------- geodesics

namespace {

using Block = RMat;

struct SegmentEval {
    PointFrame frame;
    double K = 0.0;
};

class EnergyProblem {
public:
    EnergyProblem(const FinslerModel& M, const CVec& x, const CVec& y, int N) : M_(M), x_(x), y_(y), N_(N) {}

    // Full node list from interior nodes.
    std::vector<CVec> nodes(const std::vector<CVec>& interior) const {
        std::vector<CVec> all;
        all.reserve(N_ + 1);
        all.push_back(x_);
        for (const CVec& v : interior) all.push_back(v);
        all.push_back(y_);
        return all;
    }

    bool evaluate(const std::vector<CVec>& interior, std::vector<SegmentEval>& segs, double& energy, double& length) const {
        const std::vector<CVec> all = nodes(interior);
        segs.resize(N_);
        energy = 0.0;
        length = 0.0;
        for (const CVec& v : interior)
            if (M_.phi->value(v) >= 0.0) return false;
        for (int i = 0; i < N_; ++i) {
            const CVec mid = 0.5 * (all[i] + all[i + 1]);
            try {
                segs[i].frame = point_frame(*M_.phi, mid);
            } catch (const Error&) {
                return false;
            }
            segs[i].K = finsler_norm(M_, segs[i].frame, all[i + 1] - all[i]);
            energy += segs[i].K * segs[i].K;
            length += segs[i].K;
        }
        energy *= N_;
        return std::isfinite(energy);
    }

    // Energy gradient per interior node (real), and the frozen-metric Hessian blocks.
    void gradient(const std::vector<CVec>& interior, const std::vector<SegmentEval>& segs, std::vector<RVec>& grad,
                  std::vector<Block>& G) const {
        const std::vector<CVec> all = nodes(interior);
        const int n = M_.phi->dimension();
        const int m = 2 * n;
        std::vector<RVec> dZ(N_), dM(N_);
        G.assign(N_, Block::Zero(m, m));
        for (int i = 0; i < N_; ++i) {
            const CVec Z = all[i + 1] - all[i];
            const CVec mid = 0.5 * (all[i] + all[i + 1]);
            dZ[i] = to_real(finsler_norm_gradient(M_, segs[i].frame, Z));
            const double h = 1e-4 * segs[i].frame.depth;
            RVec gm(m);
            RVec midr = to_real(mid);
            for (int a = 0; a < m; ++a) {
                RVec mp = midr, mm = midr;
                mp[a] += h;
                mm[a] -= h;
                const double kp = finsler_norm(M_, point_frame(*M_.phi, to_complex(mp)), Z);
                const double km = finsler_norm(M_, point_frame(*M_.phi, to_complex(mm)), Z);
                gm[a] = (kp - km) / (2 * h);
            }
            dM[i] = gm;
            // Metric tensor K^2 = Z^T G Z by polarization.
            auto Q = [&](const RVec& v) {
                const double k = finsler_norm(M_, segs[i].frame, to_complex(v));
                return k * k;
            };
            std::vector<double> diag(m);
            for (int a = 0; a < m; ++a) {
                RVec e = RVec::Zero(m);
                e[a] = 1.0;
                diag[a] = Q(e);
                G[i](a, a) = diag[a];
            }
            for (int a = 0; a < m; ++a)
                for (int b = a + 1; b < m; ++b) {
                    RVec e = RVec::Zero(m);
                    e[a] = 1.0;
                    e[b] = 1.0;
                    G[i](a, b) = G[i](b, a) = 0.5 * (Q(e) - diag[a] - diag[b]);
                }
        }
        grad.assign(N_ - 1, RVec::Zero(m));
        for (int j = 1; j < N_; ++j) {
            // node j is the end of segment j-1 and the start of segment j.
            RVec g = 2.0 * N_ * segs[j - 1].K * (0.5 * dM[j - 1] + dZ[j - 1]);
            g += 2.0 * N_ * segs[j].K * (0.5 * dM[j] - dZ[j]);
            grad[j - 1] = g;
        }
    }

    // Solve the block tridiagonal system H s = g with H_jj = 2N(G_{j-1}+G_j), H_j,j+1 = -2N G_j.
    std::vector<RVec> precondition(const std::vector<Block>& G, const std::vector<RVec>& g) const {
        const int J = N_ - 1;
        const Eigen::Index m = g.empty() ? 0 : g[0].size();
        std::vector<Block> Dp(J), Cp(J);
        std::vector<RVec> rp(J);
        for (int j = 0; j < J; ++j) {
            Block D = 2.0 * N_ * (G[j] + G[j + 1]);
            Block U = -2.0 * N_ * G[j + 1];  // coupling to node j+1
            Block Lw = -2.0 * N_ * G[j];     // coupling to node j-1
            RVec r = g[j];
            if (j > 0) {
                D -= Lw * Cp[j - 1];
                r -= Lw * rp[j - 1];
            }
            Eigen::LDLT<Block> ldlt(D);
            Cp[j] = ldlt.solve(U);
            rp[j] = ldlt.solve(r);
            Dp[j] = D;
        }
        std::vector<RVec> s(J, RVec::Zero(m));
        for (int j = J - 1; j >= 0; --j) {
            s[j] = rp[j];
            if (j + 1 < J) s[j] -= Cp[j] * s[j + 1];
        }
        return s;
    }

private:
    const FinslerModel& M_;
    CVec x_, y_;
    int N_;
};

double dot_nodes(const std::vector<RVec>& a, const std::vector<RVec>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
    return s;
}

double inf_norm(const std::vector<RVec>& a) {
    double s = 0.0;
    for (const RVec& v : a) s = std::max(s, v.cwiseAbs().maxCoeff());
    return s;
}

struct LocalResult {
    bool ok = false;
    double length = std::numeric_limits<double>::infinity();
    std::vector<CVec> interior;
    int iterations = 0;
};

LocalResult minimize_energy(const EnergyProblem& P, std::vector<CVec> X, const GeodesicOptions& opts) {
    LocalResult out;
    std::vector<SegmentEval> segs;
    double E, L;
    if (!P.evaluate(X, segs, E, L)) return out;
    std::vector<RVec> g, dir, s_old, g_old;
    std::vector<Block> G;
    bool have_prev = false;
    int it = 0;
    bool converged = false;
    for (; it < opts.max_iter; ++it) {
        P.gradient(X, segs, g, G);
        std::vector<RVec> s = P.precondition(G, g);
        if (inf_norm(s) < opts.grad_tol) {
            converged = true;
            break;
        }
        double beta = 0.0;
        if (have_prev) {
            std::vector<RVec> dg(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) dg[i] = g[i] - g_old[i];
            beta = std::max(0.0, dot_nodes(s, dg) / dot_nodes(s_old, g_old));
        }
        if (!have_prev) dir.assign(g.size(), RVec());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (have_prev) dir[i] = beta * dir[i] - s[i];
            else dir[i] = -s[i];
        }
        double slope = dot_nodes(g, dir);
        if (slope >= 0.0) {
            for (std::size_t i = 0; i < g.size(); ++i) dir[i] = -s[i];
            slope = dot_nodes(g, dir);
        }
        double alpha = 1.0;
        bool accepted = false;
        std::vector<SegmentEval> segs_new;
        std::vector<CVec> Xn(X.size());
        double En = E, Ln = L;
        for (int k = 0; k < 50; ++k) {
            for (std::size_t i = 0; i < X.size(); ++i) Xn[i] = X[i] + to_complex(alpha * dir[i]);
            if (P.evaluate(Xn, segs_new, En, Ln) && En <= E + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // Round-off floor: accept the current point if the step is already tiny.
            converged = inf_norm(s) < 1e3 * opts.grad_tol;
            break;
        }
        X = Xn;
        segs = segs_new;
        E = En;
        L = Ln;
        g_old = g;
        s_old = s;
        have_prev = true;
    }
    out.iterations = it;
    if (!converged) return out;
    out.ok = true;
    out.length = L;
    out.interior = X;
    return out;
}

std::vector<CVec> chord_init(const DefiningFunction& phi, const CVec& x, const CVec& y, int N) {
    std::vector<CVec> X;
    const double dx = std::max(signed_distance(phi, x), signed_distance(phi, y));
    for (int i = 1; i < N; ++i) {
        const double s = static_cast<double>(i) / N;
        CVec v = (1.0 - s) * x + s * y;
        if (phi.value(v) >= 0.0 || signed_distance(phi, v) > dx) {
            const Projection P = project_to_boundary(phi, v);
            v = P.point - (-dx) * complex_normal(phi, P.point);
        }
        X.push_back(v);
    }
    return X;
}

}  // namespace

GeodesicResult geodesic_distance(const FinslerModel& M, const CVec& x, const CVec& y, const GeodesicOptions& opts) {
    const DefiningFunction& phi = *M.phi;
    point_frame(phi, x);
    point_frame(phi, y);
    GeodesicResult res;
    const int N = std::max(2, opts.segments);
    if ((x - y).norm() == 0.0) {
        res.curve = DiscreteCurve::from_nodes(std::vector<CVec>(N + 1, x));
        return res;
    }
    EnergyProblem P(M, x, y, N);
    std::vector<std::vector<CVec>> inits;
    inits.push_back(chord_init(phi, x, y, N));
    if (opts.multi_start) {
        std::mt19937_64 rng(opts.seed);
        const double amp = 0.1 * (x - y).norm();
        for (int s = 0; s < 4; ++s) {
            CVec w = random_complex_gaussian(phi.dimension(), rng);
            w /= w.norm();
            std::vector<CVec> X = inits.front();
            for (int i = 1; i < N; ++i) {
                const double bump = std::sin(M_PI * i / N);
                CVec v = X[i - 1] + (amp * bump) * w;
                for (int k = 0; k < 60 && (phi.value(v) >= 0.0 || [&] {
                                                try {
                                                    project_to_boundary(phi, v);
                                                    return false;
                                                } catch (const Error&) {
                                                    return true;
                                                }
                                            }());
                     ++k)
                    v = 0.5 * (v + X[i - 1]);
                X[i - 1] = v;
            }
            inits.push_back(std::move(X));
        }
    }
    // Reference length of the straight-chord initialization.
    std::vector<CVec> chord_nodes = P.nodes(inits.front());
    const double chord_length = curve_length(M, DiscreteCurve::from_nodes(chord_nodes));

    bool any = false;
    LocalResult best;
    int total_iterations = 0;
    for (const auto& X0 : inits) {
        LocalResult r = minimize_energy(P, X0, opts);
        total_iterations += r.iterations;
        if (r.ok && (!any || r.length < best.length)) {
            best = r;
            any = true;
        }
    }
    if (!any) throw Error(ErrorCode::NoConvergence, "geodesic optimizer exceeded iteration cap");
    res.iterations = total_iterations;
    if (best.length <= chord_length) {
        res.length = best.length;
        res.curve = DiscreteCurve::from_nodes(P.nodes(best.interior));
    } else {
        res.length = chord_length;
        res.curve = DiscreteCurve::from_nodes(chord_nodes);
    }
    return res;
}

// ---------------------------------------------------------------- ball oracle

double ball_kobayashi_distance(const BallOracle&, const CVec& x, const CVec& y) {
    const double ax = 1.0 - x.squaredNorm();
    const double ay = 1.0 - y.squaredNorm();
    if (!(ax > 0.0) || !(ay > 0.0)) throw Error(ErrorCode::NotInDomain, "ball oracle needs |x|, |y| < 1");
    const CVec delta = y - x;
    // |1 - <y,x>|^2 |Phi_x(y)|^2 = |delta|^2 - sum_{a<b} |x_a delta_b - x_b delta_a|^2
    double wedge = 0.0;
    for (Eigen::Index a = 0; a < x.size(); ++a)
        for (Eigen::Index b = a + 1; b < x.size(); ++b) wedge += std::norm(x[a] * delta[b] - x[b] * delta[a]);
    const double num = std::max(0.0, delta.squaredNorm() - wedge);
    const double den = std::norm(1.0 - herm(y, x));
    const double s = std::sqrt(num / den);
    if (s < 0.5) return std::atanh(s);
    const double t = ax * ay / den;  // 1 - s^2
    return std::log1p(s) - 0.5 * std::log(t);
}

double ball_kobayashi_norm(const CVec& z, const CVec& Z) {
    const double a = 1.0 - z.squaredNorm();
    if (!(a > 0.0)) throw Error(ErrorCode::NotInDomain, "ball norm needs |z| < 1");
    const double k2 = (Z.squaredNorm() * a + std::norm(herm(Z, z))) / (a * a);
    return std::sqrt(k2);
}

DiscreteCurve lift_curve(const DefiningFunction& phi, const DiscreteCurve& alpha, double h) {
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "lift height must be positive");
    if (h >= phi.tubular_cap()) throw Error(ErrorCode::OutsideTubular, "lift height exceeds tubular radius");
    DiscreteCurve out;
    out.t = alpha.t;
    out.nodes.reserve(alpha.nodes.size());
    for (const CVec& p : alpha.nodes) {
        if (std::abs(phi.value(p)) > 1e-8) throw Error(ErrorCode::InvalidArgument, "curve node not on the boundary");
        out.nodes.push_back(p - h * complex_normal(phi, p));
    }
    return out;
}

double fit_ball_envelope_constant(int n, double d_max, int samples, std::uint64_t seed) {
    BallFunction ball(n, 1.0);
    FinslerModel M{&ball, 0.0, 0.0, FinslerMode::ModelCenter};
    double C = 0.0;
    auto probe = [&](const CVec& x, const CVec& Z) {
        const PointFrame F = point_frame(ball, x);
        const double km = finsler_norm(M, F, Z);
        if (km <= 0.0) return;
        const double ratio = ball_kobayashi_norm(x, Z) / km;
        C = std::max(C, std::abs(ratio - 1.0) / std::sqrt(F.depth));
    };
    // Deterministic grid in depth and normal/horizontal mixing angle.
    for (int i = 1; i <= 64; ++i) {
        const double d = d_max * i / 64.0;
        CVec x = CVec::Zero(n);
        x[0] = 1.0 - d;
        for (int k = 0; k <= 32; ++k) {
            const double th = 0.5 * M_PI * k / 32.0;
            CVec Z = CVec::Zero(n);
            Z[0] = std::cos(th);
            Z[1] = std::sin(th);
            probe(x, Z);
            Z[0] = cplx(0.0, std::cos(th));
            probe(x, Z);
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < samples; ++s) {
        CVec u = random_complex_gaussian(n, rng);
        u /= u.norm();
        const double d = d_max * std::max(U(rng), 1e-6);
        probe((1.0 - d) * u, random_complex_gaussian(n, rng));
    }
    return C;
}

}  // namespace visualmetrics
