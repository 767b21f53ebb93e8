#include "scenarios.hpp"

#include "visualmetrics/distortion_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace visualmetrics::scenarios {

namespace {

constexpr const char* kName = "bilip-p2";

// Boundary point within Euclidean distance r of c.
CVec boundary_point_near(const DefiningFunction& phi, const CVec& c, double r, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = phi.dimension();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        CVec v = random_complex_gaussian(n, rng);
        v *= r * std::pow(u01(rng), 1.0 / (2 * n - 1)) / v.norm();
        const CVec p = snap_to_boundary(phi, CVec(c + v));
        if ((p - c).norm() < r) return p;
    }
    throw Error(ErrorCode::QuantifierSearchFailed, "no boundary point found near the center");
}

struct Cell {
    double r = 0.0;
    int omega = 0;
    double r_prime = 0.0;
    double audit = 0.0;  // max over base points o
    double self_audit = 0.0;
    std::vector<double> per_o;
    std::string error;
};

}  // namespace

ScenarioOutput bilip_p2(const Config& cfg, const RunContext& ctx) {
    auto phi = domain_from(cfg);
    const int n = phi->dimension();
    const double eps_bar = cfg.get_double("bilip.eps_bar", 0.2);
    const std::vector<double> rs = cfg.get_doubles("bilip.r", {0.25, 0.125, 0.0625});
    const std::vector<double> shrink = cfg.get_doubles("bilip.r_prime_factors", {0.5, 0.25});
    const std::vector<double> o_depths = cfg.get_doubles("bilip.o_depth_factors", {0.5, 0.25});
    const int omegas = cfg.get_int("bilip.omegas", 2);
    const int points = cfg.get_int("bilip.points", 16);
    const std::vector<double> heights =
        height_schedule(cfg.get_double("bourdon.h0", phi->tubular_cap() / 4.0), cfg.get_int("bourdon.steps", 12));
    const CcOptions cco = cc_options_from(cfg);
    const BallOracle O{n};
    CVec pbar = CVec::Zero(n);
    pbar[0] = 1.0;
    pbar = snap_to_boundary(*phi, pbar);

    const std::size_t per_r = static_cast<std::size_t>(omegas) * shrink.size();
    const std::size_t count = rs.size() * per_r;
    const std::vector<Cell> cells = parallel_map<Cell>(count, ctx.jobs, [&](std::size_t idx) {
        Cell c;
        c.r = rs[idx / per_r];
        c.omega = static_cast<int>((idx % per_r) / shrink.size());
        c.r_prime = c.r * shrink[idx % shrink.size()];
        // omega at distance r/2 from pbar, shared across r'.
        std::mt19937_64 orng(item_seed(ctx.seed, 0x0e6a, (idx / per_r) * 1000 + static_cast<std::size_t>(c.omega)));
        CVec omega;
        do {
            omega = boundary_point_near(*phi, pbar, c.r, orng);
        } while ((omega - pbar).norm() < 0.25 * c.r);
        std::mt19937_64 rng(item_seed(ctx.seed, 0xb111, idx));
        std::vector<CVec> pts;
        for (int i = 0; i < points; ++i) pts.push_back(boundary_point_near(*phi, pbar, c.r_prime, rng));
        CcSolver solver(*phi, cco);
        const CcProvider cc = provider(solver);
        const auto dK = [&](const CVec& x, const CVec& y) { return ball_kobayashi_distance(O, x, y); };
        try {
            c.audit = 1.0;
            for (double f : o_depths) {
                const CVec o = below(*phi, omega, f * c.r_prime);
                std::vector<std::pair<double, double>> pairs, self;
                for (int i = 0; i < points; ++i)
                    for (int j = i + 1; j < points; ++j) {
                        const double g = bourdon_value_g(*phi, cc, o, pts[i], pts[j], heights);
                        const double k = bourdon_value_interior(*phi, dK, o, pts[i], pts[j], heights);
                        pairs.push_back({g, k});
                        self.push_back({g, g});
                    }
                const double a = bilipschitz_audit(pairs, std::min<std::size_t>(100, pairs.size()));
                c.per_o.push_back(a);
                c.audit = std::max(c.audit, a);
                c.self_audit = std::max(c.self_audit, bilipschitz_audit(self, std::min<std::size_t>(100, self.size())));
            }
        } catch (const Error& e) {
            c.error = error_name(e.code());
            c.audit = std::nan("");
        }
        return c;
    });

    // Quantifier dance: best r such that every omega admits some r' with all o passing.
    ScenarioOutput out;
    double best = std::numeric_limits<double>::infinity();
    double best_r = std::nan(""), best_rp_worst = std::nan("");
    nlohmann::ordered_json witnesses = nlohmann::ordered_json::array();
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
        double worst_omega = 0.0;
        double rp_used = 0.0;
        for (int w = 0; w < omegas; ++w) {
            double best_rp = std::numeric_limits<double>::infinity();
            double rp = std::nan("");
            for (std::size_t si = 0; si < shrink.size(); ++si) {
                const Cell& c = cells[ri * per_r + static_cast<std::size_t>(w) * shrink.size() + si];
                witnesses.push_back({{"r", c.r}, {"omega", c.omega}, {"r_prime", c.r_prime}, {"audit", c.audit},
                                     {"per_o", c.per_o}, {"error", c.error}});
                if (std::isfinite(c.audit) && c.audit < best_rp) {
                    best_rp = c.audit;
                    rp = c.r_prime;
                }
                if (best_rp <= 1.0 + eps_bar) break;
            }
            if (best_rp > worst_omega) {
                worst_omega = best_rp;
                rp_used = rp;
            }
        }
        if (worst_omega < best) {
            best = worst_omega;
            best_r = rs[ri];
            best_rp_worst = rp_used;
        }
        if (best <= 1.0 + eps_bar) break;
    }
    std::string params = kv("check", "audit") + kv("eps_bar", eps_bar) + kv("r", best_r) + kv("r_prime", best_rp_worst) +
                         kv("points", points);
    if (!(best <= 1.0 + eps_bar)) params += kv("error", error_name(ErrorCode::QuantifierSearchFailed));
    out.rows.push_back(make_row(kName, params, best, 1.0 + eps_bar, 0.0, Cmp::Le));

    double self = 0.0;
    for (const Cell& c : cells) self = std::max(self, c.self_audit);
    out.rows.push_back(make_row(kName, kv("check", "self_audit"), self, 1.0, 0.0, Cmp::Eq));

    out.summary["pbar"] = {pbar[0].real(), pbar[0].imag()};
    out.summary["eps_bar"] = eps_bar;
    out.summary["best_audit"] = best;
    out.summary["r"] = best_r;
    out.summary["r_prime"] = best_rp_worst;
    out.summary["witnesses"] = witnesses;
    return out;
}

}  // namespace visualmetrics::scenarios
