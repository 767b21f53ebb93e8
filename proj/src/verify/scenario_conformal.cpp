#include "scenarios.hpp"

#include <cmath>

namespace visualmetrics::scenarios {

namespace {

constexpr const char* kName = "conformal-p1";

struct Direction {
    CVec W;
    double V = 0.0;
};

std::vector<Direction> directions(int n, int count, std::mt19937_64& rng) {
    std::vector<Direction> out;
    for (int k = 0; k < count; ++k) {
        CVec W = random_complex_gaussian(n - 1, rng);
        W /= W.norm();
        // Spread the vertical share evenly from horizontal to vertical.
        const double theta = (count == 1 ? 0.0 : (k / static_cast<double>(count - 1)) * M_PI - 0.5 * M_PI) * 0.98;
        W *= std::cos(theta);
        const double V = std::sin(theta);
        const double d = heisenberg_distance(W, V);
        out.push_back({W / d, V / (d * d)});
    }
    return out;
}

struct Item {
    std::string kind;
    double h = 0.0;
    double dcc_po = 0.0;
    double target = 0.0;
    double limit = std::nan("");
    double spread = std::nan("");
    std::string error;
};

}  // namespace

ScenarioOutput conformal_p1(const Config& cfg, const RunContext& ctx) {
    auto phi = domain_from(cfg);
    const int n = phi->dimension();
    const int pairs = cfg.get_int("conformal.pairs", 20);
    const double h_min = cfg.get_double("conformal.h_min", 0.3);
    const double h_max = cfg.get_double("conformal.h_max", 0.6);
    const std::vector<double> radii = cfg.get_doubles("conformal.radii", {0.08, 0.04, 0.02, 0.01});
    const int ndir = cfg.get_int("conformal.directions", 6);
    const double tol = cfg.get_double("conformal.tol", 0.01);
    const std::vector<double> heights =
        height_schedule(cfg.get_double("bourdon.h0", phi->tubular_cap() / 4.0), cfg.get_int("bourdon.steps", 12));

    CcOptions cco = cc_options_from(cfg);
    BoundaryGraph graph;
    const int V = cfg.get_int("graph.vertices", 0);
    if (V > 0) {
        graph = build_boundary_graph(*phi, V, item_seed(ctx.seed, 0x67a9, 0));
        cco.graph = &graph;
    }

    // Items: random (p, o) pairs, then the centered and antipodal examples.
    const std::size_t count = static_cast<std::size_t>(pairs) + 2;
    const std::vector<Item> items = parallel_map<Item>(count, ctx.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xc0f1, i));
        Item it;
        CVec foot = sample_boundary_point(*phi, rng);
        CVec p;
        if (i < static_cast<std::size_t>(pairs)) {
            it.kind = "random";
            it.h = h_min + (h_max - h_min) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            p = sample_boundary_point(*phi, rng);
        } else if (i == static_cast<std::size_t>(pairs)) {
            it.kind = "centered";
            it.h = 0.5;
            p = foot;
        } else {
            it.kind = "antipodal";
            it.h = 0.5;
            p = ray_to_boundary(*phi, phi->center() - foot);
        }
        const CVec o = below(*phi, foot, it.h * it.h);
        const PointFrame fo = point_frame(*phi, o);
        CcSolver solver(*phi, cco);
        const CcProvider cc = provider(solver);
        it.dcc_po = (p - fo.foot).norm() < 1e-12 ? 0.0 : solver.distance(p, fo.foot);
        const double ho = std::sqrt(fo.depth);
        it.target = ho / ((it.dcc_po + ho) * (it.dcc_po + ho));
        const std::vector<Direction> dirs = directions(n, ndir, rng);
        try {
            const RatioLimit rl = conformal_ratio_limit(
                [&](std::size_t k, double r) {
                    const CVec q = heisenberg_point(*phi, p, dirs[k].W, dirs[k].V, r, cco.segments);
                    return std::make_pair(solver.distance(p, q), bourdon_value_g(*phi, cc, o, p, q, heights));
                },
                dirs.size(), radii, 1e300);
            it.limit = rl.limit;
            it.spread = rl.spread;
        } catch (const Error& e) {
            it.error = error_name(e.code());
        }
        return it;
    });

    ScenarioOutput out;
    nlohmann::ordered_json detail = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        std::string params = kv("check", "ratio_limit") + kv("kind", it.kind) + kv("item", static_cast<double>(i)) +
                             kv("h", it.h) + kv("d_cc_p_pio", it.dcc_po);
        if (!it.error.empty()) params += kv("error", it.error);
        out.rows.push_back(make_row(kName, params, it.limit, it.target, tol * it.target, Cmp::Eq));
        out.rows.push_back(make_row(kName, kv("check", "spread") + kv("kind", it.kind) + kv("item", static_cast<double>(i)),
                                    it.spread, tol, 0.0, Cmp::Le));
        detail.push_back({{"kind", it.kind}, {"h", it.h}, {"d_cc_p_pio", it.dcc_po}, {"limit", it.limit},
                          {"target", it.target}, {"spread", it.spread}, {"error", it.error}});
    }
    // Control: d_CC against itself.
    {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xc0f2, 0));
        const CVec p = sample_boundary_point(*phi, rng);
        CcSolver solver(*phi, cco);
        const std::vector<Direction> dirs = directions(n, 2, rng);
        const RatioLimit rl = conformal_ratio_limit(
            [&](std::size_t k, double r) {
                const double d = solver.distance(p, heisenberg_point(*phi, p, dirs[k].W, dirs[k].V, r, cco.segments));
                return std::make_pair(d, d);
            },
            dirs.size(), radii, tol);
        out.rows.push_back(make_row(kName, kv("check", "self_control"), rl.limit, 1.0, 0.0, Cmp::Eq));
    }
    out.summary["radii"] = radii;
    out.summary["directions"] = ndir;
    out.summary["bourdon_heights"] = heights;
    if (V > 0)
        out.summary["graph"] = {{"vertices", graph.vertices.size()}, {"edges", graph.edges.size()},
                                {"rho_edge", graph.rho_edge}, {"k_values", graph.k_values}};
    out.summary["items"] = detail;
    return out;
}

}  // namespace visualmetrics::scenarios
