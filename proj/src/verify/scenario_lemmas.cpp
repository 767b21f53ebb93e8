#include "scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace visualmetrics::scenarios {

namespace {

constexpr const char* kName = "lemma-suite";

struct Knot {
    CVec foot;
    double depth = 0.0;
};

// Dense curve through knots: feet interpolated along chords and snapped, depths interpolated in log scale.
DiscreteCurve knot_curve(const DefiningFunction& phi, const std::vector<Knot>& knots, double log_step) {
    std::vector<CVec> nodes;
    nodes.push_back(below(phi, knots.front().foot, knots.front().depth));
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const Knot& a = knots[k];
        const Knot& b = knots[k + 1];
        const double dl = std::log(b.depth / a.depth);
        const int m = std::max(64, static_cast<int>(std::ceil(std::abs(dl) / log_step)));
        for (int i = 1; i <= m; ++i) {
            const double s = static_cast<double>(i) / m;
            const CVec foot = i == m ? b.foot : snap_to_boundary(phi, CVec((1.0 - s) * a.foot + s * b.foot));
            nodes.push_back(below(phi, foot, a.depth * std::exp(s * dl)));
        }
    }
    return DiscreteCurve::from_nodes(std::move(nodes));
}

std::vector<Knot> random_knots(const DefiningFunction& phi, const Knot& x1, const Knot& x2, double d_lo, double d_hi,
                               int interior, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    const double spread = 0.3 * (x1.foot - x2.foot).norm() + 0.05;
    std::vector<Knot> knots{x1};
    for (int k = 1; k <= interior; ++k) {
        const double s = static_cast<double>(k) / (interior + 1);
        CVec c = (1.0 - s) * x1.foot + s * x2.foot;
        for (int a = 0; a < c.size(); ++a) c[a] += spread * std::complex<double>(g(rng), g(rng));
        knots.push_back({snap_to_boundary(phi, c), d_lo * std::pow(d_hi / d_lo, u01(rng))});
    }
    knots.push_back(x2);
    return knots;
}

// Piecewise-constant controls split into `factor` equal pieces each.
HorizontalControls subdivide(const HorizontalControls& c, int factor) {
    HorizontalControls out;
    out.start = c.start;
    for (const CVec& u : c.u)
        for (int i = 0; i < factor; ++i) out.u.push_back(u);
    return out;
}

}  // namespace

ScenarioOutput lemma_suite(const Config& cfg, const RunContext& ctx) {
    auto phi = domain_from(cfg);
    const int n = phi->dimension();
    const double C = envelope_constant(cfg, n);
    const double eps_bar = cfg.get_double("metric.eps_bar", 0.05);
    const double radial_tol = cfg.get_double("lemmas.radial_tol", 1e-8);
    const double slack = cfg.get_double("lemmas.slack", 1e-6);
    const int curves = cfg.get_int("lemmas.curves", 100);
    const int far_curves = cfg.get_int("lemmas.far_curves", 100);
    const double max_depth = std::min(0.25, 0.5 * phi->tubular_cap());
    const std::vector<double> ts = cfg.get_doubles("lemmas.lift_t", {0.2, 0.1, 0.05, 0.025});
    const FinslerModel center{phi.get(), C, eps_bar, FinslerMode::ModelCenter};
    const FinslerModel lower{phi.get(), C, eps_bar, FinslerMode::LowerEnvelope};
    const FinslerModel upper{phi.get(), C, eps_bar, FinslerMode::UpperEnvelope};
    const CcOptions cco = cc_options_from(cfg);
    ScenarioOutput out;

    // Radial segments over a fiber, nodes geometric in depth.
    const int radial_trials = cfg.get_int("lemmas.radial_trials", 10);
    for (int t = 0; t < radial_trials; ++t) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0x4ad1, static_cast<std::uint64_t>(t)));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        CVec p;
        double d1 = 0.04, d2 = 0.01;
        if (t == 0) {
            p = CVec::Zero(n);
            p[0] = 1.0;
            p = snap_to_boundary(*phi, p);
        } else {
            p = sample_boundary_point(*phi, rng);
            d1 = max_depth * std::pow(10.0, -u01(rng));
            d2 = d1 * std::pow(10.0, -2.0 * u01(rng));
        }
        const int m = std::max(4096, static_cast<int>(std::ceil(std::log(d1 / d2) / 2e-4)));
        std::vector<CVec> nodes(m + 1);
        for (int i = 0; i <= m; ++i) nodes[i] = below(*phi, p, d1 * std::pow(d2 / d1, static_cast<double>(i) / m));
        const double len = curve_length(center, DiscreteCurve::from_nodes(std::move(nodes)));
        const double target = 0.5 * std::log(d1 / d2);
        out.rows.push_back(make_row(kName, kv("check", "radial") + kv("trial", t) + kv("depth1", d1) + kv("depth2", d2) +
                                               kv("segments", m),
                                    len, target, radial_tol, Cmp::Eq));
    }

    // Lower bound for arbitrary curves, lower-envelope lengths.
    struct Trial {
        double length = 0.0;
        double bound = 0.0;
        double h1 = 0.0, h2 = 0.0, dcc = 0.0;
    };
    const std::vector<Trial> below_res = parallel_map<Trial>(static_cast<std::size_t>(curves), ctx.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xb0b1, i));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        Knot a{sample_boundary_point(*phi, rng), max_depth * std::pow(10.0, -3.0 * u01(rng))};
        const CVec q = heisenberg_sample(*phi, a.foot, 0.05 + 0.5 * u01(rng), rng, cco.segments).q;
        Knot b{q, max_depth * std::pow(10.0, -3.0 * u01(rng))};
        if (a.depth < b.depth) std::swap(a, b);
        const auto knots = random_knots(*phi, a, b, 1e-4, max_depth, 1 + static_cast<int>(4 * u01(rng)), rng);
        Trial tr;
        tr.length = curve_length(lower, knot_curve(*phi, knots, 1e-3));
        tr.h1 = std::sqrt(a.depth);
        tr.h2 = std::sqrt(b.depth);
        tr.bound = std::log(tr.h1 / tr.h2) - C * (tr.h1 - tr.h2);
        return tr;
    });
    double worst_below = 1e300;
    for (std::size_t i = 0; i < below_res.size(); ++i) {
        const Trial& tr = below_res[i];
        out.rows.push_back(make_row(kName, kv("check", "bound_below") + kv("trial", static_cast<double>(i)) + kv("h1", tr.h1) +
                                               kv("h2", tr.h2),
                                    tr.length, tr.bound - slack, 0.0, Cmp::Ge));
        worst_below = std::min(worst_below, tr.length - tr.bound);
    }

    // Curves reaching height d_CC(p1, p2).
    const std::vector<Trial> far_res = parallel_map<Trial>(static_cast<std::size_t>(far_curves), ctx.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xfa41, i));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const CVec p1 = sample_boundary_point(*phi, rng);
        const CVec p2 = heisenberg_sample(*phi, p1, 0.05 + 0.35 * u01(rng), rng, cco.segments).q;
        CcSolver solver(*phi, cco);
        Trial tr;
        tr.dcc = solver.distance(p1, p2);
        const double top = tr.dcc * tr.dcc;
        const Knot a{p1, top * std::pow(10.0, -0.1 - 2.0 * u01(rng))};
        const Knot b{p2, top * std::pow(10.0, -0.1 - 2.0 * u01(rng))};
        std::vector<Knot> knots = random_knots(*phi, a, b, 1e-4, max_depth, 3, rng);
        knots[1 + static_cast<int>(3 * u01(rng))].depth = std::min(max_depth, top * (1.0 + u01(rng)));
        tr.length = curve_length(lower, knot_curve(*phi, knots, 1e-3));
        tr.h1 = std::sqrt(a.depth);
        tr.h2 = std::sqrt(b.depth);
        tr.bound = 2.0 * std::log(tr.dcc / std::sqrt(tr.h1 * tr.h2)) - C * (2.0 * tr.dcc - tr.h1 - tr.h2);
        return tr;
    });
    double worst_far = 1e300;
    for (std::size_t i = 0; i < far_res.size(); ++i) {
        const Trial& tr = far_res[i];
        out.rows.push_back(make_row(kName, kv("check", "bound_above_h") + kv("trial", static_cast<double>(i)) +
                                               kv("d_cc", tr.dcc) + kv("h1", tr.h1) + kv("h2", tr.h2),
                                    tr.length, tr.bound - slack, 0.0, Cmp::Ge));
        worst_far = std::min(worst_far, tr.length - tr.bound);
    }

    // Lifted horizontal paths at Euclidean depth d_CC.
    std::mt19937_64 rng(item_seed(ctx.seed, 0x11f7, 0));
    const CVec p = sample_boundary_point(*phi, rng);
    CVec W = random_complex_gaussian(n - 1, rng);
    W /= W.norm();
    const double V = 0.5 * std::normal_distribution<double>(0.0, 1.0)(rng);
    const double unit = heisenberg_distance(W, V);
    struct Lift {
        double dcc = 0.0, eta = 0.0, bound = 0.0, length = 0.0;
    };
    const std::vector<Lift> lifts = parallel_map<Lift>(ts.size(), ctx.jobs, [&](std::size_t k) {
        const CVec q = heisenberg_point(*phi, p, W / unit, V / (unit * unit), ts[k], cco.segments);
        CcSolver solver(*phi, cco);
        const CcResult& r = solver.solve(p, q);
        const HorizontalControls ctl = subdivide(r.controls, 8);
        const FlowTrace flow = horizontal_flow(*phi, ctl);
        Lift L;
        L.dcc = r.distance;
        L.eta = std::max(0.0, flow.length / r.distance - 1.0);
        const double h = L.dcc;
        L.bound = (1.0 + C * std::sqrt(h)) * (1.0 + L.eta) * (C * L.dcc + std::sqrt(1.0 + eps_bar) * L.dcc / std::sqrt(h));
        L.length = curve_length(upper, lift_curve(*phi, DiscreteCurve::from_nodes(flow.states), h));
        return L;
    });
    for (std::size_t k = 0; k + 1 < lifts.size(); ++k) {
        out.rows.push_back(make_row(kName, kv("check", "lift_bound_monotone") + kv("t_from", ts[k]) + kv("t_to", ts[k + 1]),
                                    lifts[k + 1].bound, lifts[k].bound, 0.0, Cmp::Le));
        out.rows.push_back(make_row(kName, kv("check", "lift_length_monotone") + kv("t_from", ts[k]) + kv("t_to", ts[k + 1]),
                                    lifts[k + 1].length, lifts[k].length, 0.0, Cmp::Le));
    }

    out.summary["C"] = C;
    out.summary["eps_bar"] = eps_bar;
    out.summary["min_margin_bound_below"] = worst_below;
    out.summary["min_margin_bound_above_h"] = worst_far;
    nlohmann::ordered_json lj = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < lifts.size(); ++k)
        lj.push_back({{"t", ts[k]}, {"d_cc", lifts[k].dcc}, {"eta", lifts[k].eta}, {"bound", lifts[k].bound},
                      {"lifted_length", lifts[k].length}});
    out.summary["lifted_paths"] = lj;
    return out;
}

}  // namespace visualmetrics::scenarios
