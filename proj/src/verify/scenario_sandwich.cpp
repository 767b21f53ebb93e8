#include "scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace visualmetrics {

namespace {

constexpr const char* kName = "sandwich";

struct PairResult {
    double dcc = 0.0;
    std::vector<double> disc;  // |d_K - g| per height
};

}  // namespace

std::vector<EvidenceRow> oracle_sanity_rows(const Config& cfg, const RunContext& ctx) {
    const int n = cfg.get_int("oracle.n", 2);
    const int count = cfg.get_int("oracle.triples", 10000);
    const double tol = cfg.get_double("oracle.tol", 1e-12);
    std::mt19937_64 rng(scenarios::item_seed(ctx.seed, 0x0c1e, 0));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto point = [&] {
        CVec z = random_complex_gaussian(n, rng);
        const double depth = std::pow(10.0, -3.0 * u01(rng));
        return CVec(z * ((1.0 - depth) / z.norm()));
    };
    const BallOracle O{n};
    double worst_triangle = -1e300;
    double worst_unitary = 0.0;
    for (int t = 0; t < count; ++t) {
        const CVec x = point(), y = point(), z = point();
        const double dxy = ball_kobayashi_distance(O, x, y);
        const double dyz = ball_kobayashi_distance(O, y, z);
        const double dxz = ball_kobayashi_distance(O, x, z);
        worst_triangle = std::max(worst_triangle, dxz - dxy - dyz);
        const CMat U = random_unitary(n, rng);
        const CVec Ux = U * x, Uy = U * y;
        worst_unitary = std::max(worst_unitary, std::abs(ball_kobayashi_distance(O, Ux, Uy) - dxy));
    }
    std::vector<EvidenceRow> rows;
    rows.push_back(make_row(kName, kv("check", "oracle_triangle") + kv("triples", count), std::max(0.0, worst_triangle),
                            0.0, tol, Cmp::Le));
    rows.push_back(make_row(kName, kv("check", "oracle_unitary") + kv("pairs", count), worst_unitary, 0.0, tol, Cmp::Le));
    return rows;
}

namespace scenarios {

ScenarioOutput sandwich(const Config& cfg, const RunContext& ctx) {
    auto phi = domain_from(cfg);
    const bool ball = phi->name() == "ball" && phi->parameters()[1] == 1.0;
    const std::vector<double> scales = cfg.get_doubles("sandwich.scales", {0.1, 0.2, 0.3, 0.5});
    const int per_scale = cfg.get_int("sandwich.pairs_per_scale", 5);
    const std::vector<double> heights = cfg.get_doubles("sandwich.heights", {0.2, 0.1, 0.05, 0.025, 0.0125});
    const double eps = cfg.get_double("sandwich.epsilon", 0.05);
    const double C = envelope_constant(cfg, phi->dimension());
    const CcOptions cco = cc_options_from(cfg);
    const BallOracle O{phi->dimension()};
    const FinslerModel model{phi.get(), C, cfg.get_double("metric.eps_bar", 0.05), FinslerMode::ModelCenter};
    GeodesicOptions gopt;
    gopt.segments = cfg.get_int("geodesic.segments", 32);

    auto dK = [&](const CVec& x, const CVec& y) {
        if (ball) return ball_kobayashi_distance(O, x, y);
        return geodesic_distance(model, x, y, gopt).length;
    };

    const std::size_t npairs = scales.size() * static_cast<std::size_t>(per_scale);
    const std::vector<PairResult> res = parallel_map<PairResult>(npairs, ctx.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0x5a4d, i));
        const double s = scales[i / per_scale];
        const CVec p = sample_boundary_point(*phi, rng);
        const CVec q = heisenberg_sample(*phi, p, s, rng, cco.segments).q;
        CcSolver solver(*phi, cco);
        PairResult r;
        r.dcc = solver.distance(p, q);
        for (double h : heights) {
            const CVec x = below(*phi, p, h * h);
            const CVec y = below(*phi, q, h * h);
            const double g = filling_formula(r.dcc, h, h);
            r.disc.push_back(std::abs(dK(x, y) - g));
        }
        return r;
    });

    ScenarioOutput out;
    std::vector<double> maxdisc(heights.size(), 0.0);
    for (const PairResult& r : res)
        for (std::size_t k = 0; k < heights.size(); ++k) maxdisc[k] = std::max(maxdisc[k], r.disc[k]);
    for (std::size_t k = 0; k + 1 < heights.size(); ++k)
        out.rows.push_back(make_row(kName,
                                    kv("check", "nonincreasing") + kv("h_from", heights[k]) + kv("h_to", heights[k + 1]) +
                                        kv("pairs", static_cast<double>(npairs)),
                                    maxdisc[k + 1], maxdisc[k], 0.0, Cmp::Le));
    out.rows.push_back(make_row(kName, kv("check", "final") + kv("h", heights.back()) + kv("pairs", static_cast<double>(npairs)),
                                maxdisc.back(), eps, 0.0, Cmp::Le));

    // p = q, x = y.
    {
        std::mt19937_64 rng(item_seed(ctx.seed, 0x5a4e, 0));
        const CVec p = sample_boundary_point(*phi, rng);
        const double h = heights.back();
        const CVec x = below(*phi, p, h * h);
        out.rows.push_back(make_row(kName, kv("check", "diagonal") + kv("h", h), std::abs(dK(x, x) - filling_formula(0.0, h, h)),
                                    0.0, 1e-12, Cmp::Eq));
    }
    // Same fiber: |d_K - g| <= C (h1 - h2).
    {
        std::mt19937_64 rng(item_seed(ctx.seed, 0x5a4f, 0));
        const CVec p = sample_boundary_point(*phi, rng);
        const double h1 = cfg.get_double("sandwich.fiber_h1", 0.2);
        const double h2 = cfg.get_double("sandwich.fiber_h2", 0.1);
        const double d = dK(below(*phi, p, h1 * h1), below(*phi, p, h2 * h2));
        out.rows.push_back(make_row(kName, kv("check", "same_fiber") + kv("h1", h1) + kv("h2", h2) + kv("C", C),
                                    std::abs(d - filling_formula(0.0, h1, h2)), C * (h1 - h2), 0.0, Cmp::Le));
    }
    for (EvidenceRow& r : oracle_sanity_rows(cfg, ctx)) out.rows.push_back(std::move(r));

    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < res.size(); ++i)
        pairs.push_back({{"scale", scales[i / per_scale]}, {"d_cc", res[i].dcc}, {"discrepancy", res[i].disc}});
    out.summary["heights"] = heights;
    out.summary["max_discrepancy"] = maxdisc;
    out.summary["C"] = C;
    out.summary["d_K"] = ball ? "ball-oracle" : "model-geodesic";
    out.summary["pairs"] = pairs;
    return out;
}

}  // namespace scenarios
}  // namespace visualmetrics
