#include "visualmetrics/boundary_cc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace visualmetrics {

double approx_norm(const ApproxMetric& A, const CVec& p, const CVec& Z) {
    if (std::abs(A.phi->value(p)) >= 1e-10) throw Error(ErrorCode::InvalidArgument, "approx_norm needs a boundary point");
    const LeviData L = levi_data(*A.phi, p);
    const cplx c = herm(Z, L.nu);
    if (std::abs(c.real()) > 1e-8 * std::max(1.0, Z.norm()))
        throw Error(ErrorCode::NotTangent, "vector has a component along the outward normal");
    const CVec ZH = Z - L.nu * c;
    const double lev = (ZH.transpose() * L.levi * ZH.conjugate())(0, 0).real();
    return std::sqrt(std::max(0.0, lev) + A.k * A.k * std::norm(c));
}

namespace {

// g_k^2 of the chord b - a, evaluated at the boundary point above the chord midpoint.
struct ChordEval {
    CVec mid;
    double levi = 0.0;   // L(mid, Delta_H)
    cplx vertical = 0.0; // <Delta_T, nu>, purely imaginary up to round-off
};

ChordEval chord_eval(const DefiningFunction& phi, const CVec& a, const CVec& b) {
    ChordEval ce;
    ce.mid = snap_to_boundary(phi, 0.5 * (a + b));
    const LeviData L = levi_data(phi, ce.mid);
    CVec d = b - a;
    d -= L.nu * herm(d, L.nu).real();  // remove the real normal component
    ce.vertical = herm(d, L.nu);
    const CVec dH = d - L.nu * ce.vertical;
    ce.levi = std::max(0.0, (dH.transpose() * L.levi * dH.conjugate())(0, 0).real());
    return ce;
}

}  // namespace

double horizontal_length(const DefiningFunction& phi, const DiscreteCurve& alpha, double tau_rel) {
    for (const CVec& p : alpha.nodes)
        if (std::abs(phi.value(p)) > 1e-8) throw Error(ErrorCode::InvalidArgument, "curve node not on the boundary");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < alpha.nodes.size(); ++i) {
        const double seg = (alpha.nodes[i + 1] - alpha.nodes[i]).norm();
        if (seg == 0.0) continue;
        const ChordEval ce = chord_eval(phi, alpha.nodes[i], alpha.nodes[i + 1]);
        if (std::abs(ce.vertical) > tau_rel * seg)
            throw Error(ErrorCode::NotHorizontal, "segment " + std::to_string(i) + " is not horizontal",
                        static_cast<long>(i));
        total += std::sqrt(ce.levi);
    }
    return total;
}

// ---------------------------------------------------------------- continuous d_k

namespace {

double chord_gk2(const DefiningFunction& phi, const CVec& mid_unsnapped, const CVec& delta, double k) {
    const CVec mid = snap_to_boundary(phi, mid_unsnapped);
    const LeviData L = levi_data(phi, mid);
    CVec d = delta;
    d -= L.nu * herm(d, L.nu).real();
    const cplx c = herm(d, L.nu);
    const CVec dH = d - L.nu * c;
    return std::max(0.0, (dH.transpose() * L.levi * dH.conjugate())(0, 0).real()) + k * k * std::norm(c);
}

struct PathEnergy {
    double energy = 0.0;
    double length = 0.0;
};

PathEnergy path_energy(const DefiningFunction& phi, const std::vector<CVec>& X, double k) {
    PathEnergy pe;
    const int N = static_cast<int>(X.size()) - 1;
    for (int i = 0; i < N; ++i) {
        const double g2 = chord_gk2(phi, 0.5 * (X[i] + X[i + 1]), X[i + 1] - X[i], k);
        pe.energy += g2;
        pe.length += std::sqrt(g2);
    }
    pe.energy *= N;
    return pe;
}

}  // namespace

ApproxDistanceResult approx_distance(const DefiningFunction& phi, double k, const std::vector<CVec>& init_nodes,
                                     int max_iter) {
    if (init_nodes.size() < 2) throw Error(ErrorCode::InvalidArgument, "approx_distance needs >= 2 nodes");
    const int n = phi.dimension();
    const int m = 2 * n;
    std::vector<CVec> X = init_nodes;
    for (CVec& x : X) x = snap_to_boundary(phi, x);
    const int N = static_cast<int>(X.size()) - 1;
    PathEnergy cur = path_energy(phi, X, k);
    ApproxDistanceResult best{cur.length, X};
    if (N < 2) return best;

    for (int it = 0; it < max_iter; ++it) {
        // Per-segment quadratic forms and gradients.
        std::vector<RMat> G(N);
        std::vector<RVec> gmid(N), gdel(N);
        for (int i = 0; i < N; ++i) {
            const CVec mid = 0.5 * (X[i] + X[i + 1]);
            const CVec del = X[i + 1] - X[i];
            auto q = [&](const RVec& v) { return chord_gk2(phi, mid, to_complex(v), k); };
            G[i].resize(m, m);
            std::vector<double> diag(m);
            for (int a = 0; a < m; ++a) {
                RVec e = RVec::Zero(m);
                e[a] = 1.0;
                diag[a] = q(e);
                G[i](a, a) = diag[a];
            }
            for (int a = 0; a < m; ++a)
                for (int b = a + 1; b < m; ++b) {
                    RVec e = RVec::Zero(m);
                    e[a] = 1.0;
                    e[b] = 1.0;
                    G[i](a, b) = G[i](b, a) = 0.5 * (q(e) - diag[a] - diag[b]);
                }
            gdel[i] = 2.0 * G[i] * to_real(del);
            const double h = 1e-6;
            const RVec mr = to_real(mid);
            gmid[i].resize(m);
            for (int a = 0; a < m; ++a) {
                RVec mp = mr, mm = mr;
                mp[a] += h;
                mm[a] -= h;
                gmid[i][a] = (chord_gk2(phi, to_complex(mp), del, k) - chord_gk2(phi, to_complex(mm), del, k)) / (2 * h);
            }
        }
        const int J = N - 1;
        std::vector<RVec> grad(J);
        std::vector<RVec> normals(J);
        for (int j = 1; j < N; ++j) {
            RVec g = N * (0.5 * gmid[j - 1] + gdel[j - 1]) + N * (0.5 * gmid[j] - gdel[j]);
            const RVec nr = to_real(complex_normal(phi, X[j]));
            g -= g.dot(nr) * nr;
            grad[j - 1] = g;
            normals[j - 1] = nr;
        }
        // Block tridiagonal solve with the normal direction pinned.
        std::vector<RMat> Cp(J);
        std::vector<RVec> rp(J);
        for (int j = 0; j < J; ++j) {
            RMat D = 2.0 * N * (G[j] + G[j + 1]);
            const double scale = std::max(1e-12, D.trace() / m);
            D += scale * normals[j] * normals[j].transpose();
            const RMat U = -2.0 * N * G[j + 1];
            const RMat Lw = -2.0 * N * G[j];
            RVec r = grad[j];
            if (j > 0) {
                D -= Lw * Cp[j - 1];
                r -= Lw * rp[j - 1];
            }
            Eigen::FullPivLU<RMat> lu(D);
            Cp[j] = lu.solve(U);
            rp[j] = lu.solve(r);
        }
        std::vector<RVec> s(J);
        double smax = 0.0;
        for (int j = J - 1; j >= 0; --j) {
            s[j] = rp[j];
            if (j + 1 < J) s[j] -= Cp[j] * s[j + 1];
            s[j] -= s[j].dot(normals[j]) * normals[j];
            smax = std::max(smax, s[j].cwiseAbs().maxCoeff());
        }
        if (smax < 1e-11) break;
        double slope = 0.0;
        for (int j = 0; j < J; ++j) slope -= grad[j].dot(s[j]);
        if (slope >= 0.0) break;
        double alpha = 1.0;
        bool accepted = false;
        for (int t = 0; t < 40; ++t) {
            std::vector<CVec> Y = X;
            for (int j = 1; j < N; ++j) Y[j] = snap_to_boundary(phi, X[j] - to_complex(alpha * s[j - 1]));
            const PathEnergy pe = path_energy(phi, Y, k);
            if (pe.energy <= cur.energy + 1e-4 * alpha * slope) {
                X = std::move(Y);
                const double rel = (cur.energy - pe.energy) / std::max(cur.energy, 1e-300);
                cur = pe;
                accepted = true;
                if (cur.length < best.length) best = {cur.length, X};
                if (rel < 1e-14) it = max_iter;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    return best;
}

std::vector<double> approx_distance_schedule(const DefiningFunction& phi, const std::vector<double>& ks,
                                             const std::vector<CVec>& init_nodes) {
    std::vector<std::size_t> order(ks.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ks[a] > ks[b]; });
    std::vector<double> out(ks.size());
    std::vector<CVec> nodes = init_nodes;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        ApproxDistanceResult r = approx_distance(phi, ks[idx], nodes);
        out[idx] = std::min(r.length, prev);
        prev = out[idx];
        nodes = r.nodes;
    }
    return out;
}

}  // namespace visualmetrics
