#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace visualmetrics::scenarios {

namespace {

constexpr const char* kName = "hyperbolicity";

// All-pairs path metric of a weighted tree given by parent links and integer edge weights.
FiniteMetricSample random_tree_metric(int nodes, std::mt19937_64& rng) {
    std::vector<int> parent(nodes, -1);
    std::vector<double> w(nodes, 0.0);
    for (int v = 1; v < nodes; ++v) {
        parent[v] = std::uniform_int_distribution<int>(0, v - 1)(rng);
        w[v] = std::uniform_int_distribution<int>(1, 9)(rng);
    }
    std::vector<double> depth(nodes, 0.0);
    std::vector<int> level(nodes, 0);
    for (int v = 1; v < nodes; ++v) {
        depth[v] = depth[parent[v]] + w[v];
        level[v] = level[parent[v]] + 1;
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int a = 0; a < nodes; ++a)
        for (int b = a + 1; b < nodes; ++b) {
            int x = a, y = b;
            while (x != y) {
                if (level[x] >= level[y]) x = parent[x];
                else y = parent[y];
            }
            d(a, b) = d(b, a) = depth[a] + depth[b] - 2.0 * depth[x];
        }
    return FiniteMetricSample(d);
}

FiniteMetricSample star_tree() {
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(5, 5, 2.0);
    for (int i = 0; i < 5; ++i) d(i, i) = 0.0;
    for (int i = 1; i < 5; ++i) d(0, i) = d(i, 0) = 1.0;
    return FiniteMetricSample(d);
}

FiniteMetricSample circle_sample(double R, int m) {
    Eigen::MatrixXd d(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double t = 2.0 * M_PI * (i - j) / m;
            d(i, j) = i == j ? 0.0 : R * std::sqrt(2.0 - 2.0 * std::cos(t));
        }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) d(j, i) = d(i, j);
    return FiniteMetricSample(d);
}

FiniteMetricSample con_square_sample(int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double D = 2.0;
    Eigen::MatrixXd P(m, 2);
    std::vector<double> u(m);
    for (int i = 0; i < m; ++i) {
        P(i, 0) = u01(rng);
        P(i, 1) = u01(rng);
        u[i] = D * std::pow(10.0, -3.0 * u01(rng)) * 0.999;
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) d(i, j) = d(j, i) = filling_formula((P.row(i) - P.row(j)).norm(), u[i], u[j]);
    return FiniteMetricSample(d);
}

}  // namespace

/// Model length distances between sample points through an interior k-nearest-neighbor graph.
FiniteMetricSample model_distance_sample(const DefiningFunction& phi, const FinslerModel& M, int points, double max_depth,
                                         int helpers, int neighbors, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<CVec> nodes;
    for (int i = 0; i < points; ++i) {
        const CVec p = sample_boundary_point(phi, rng);
        nodes.push_back(below(phi, p, max_depth * (0.05 + 0.95 * u01(rng))));
    }
    const double deep = 0.9 * phi.tubular_cap();
    for (int i = 0; i < helpers; ++i) {
        const CVec p = sample_boundary_point(phi, rng);
        nodes.push_back(below(phi, p, 0.005 * std::pow(deep / 0.005, u01(rng))));
    }
    const int N = static_cast<int>(nodes.size());
    std::vector<std::vector<std::pair<int, double>>> adj(N);
    std::vector<std::pair<double, int>> cand(N);
    for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; ++b) cand[b] = {(nodes[a] - nodes[b]).norm(), b};
        const int k = std::min(neighbors + 1, N);
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        for (int t = 1; t < k; ++t) {
            const int b = cand[t].second;
            const double w = curve_length(M, DiscreteCurve::segment(nodes[a], nodes[b], 8));
            adj[a].push_back({b, w});
            adj[b].push_back({a, w});
        }
    }
    Eigen::MatrixXd d(points, points);
    std::vector<double> dist(N);
    for (int s = 0; s < points; ++s) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        dist[s] = 0.0;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            const auto [dv, v] = pq.top();
            pq.pop();
            if (dv > dist[v]) continue;
            for (const auto& [w, l] : adj[v])
                if (dv + l < dist[w]) {
                    dist[w] = dv + l;
                    pq.emplace(dist[w], w);
                }
        }
        for (int t = 0; t < points; ++t) d(s, t) = dist[t];
    }
    for (int i = 0; i < points; ++i) {
        if (!std::isfinite(d.row(i).maxCoeff())) throw Error(ErrorCode::GraphDisconnected, "interior graph is not connected");
        for (int j = i + 1; j < points; ++j) d(i, j) = d(j, i) = std::min(d(i, j), d(j, i));
    }
    return FiniteMetricSample(d);
}

ScenarioOutput hyperbolicity(const Config& cfg, const RunContext& ctx) {
    auto phi = domain_from(cfg);
    ScenarioOutput out;

    const DeltaResult star = delta_hyperbolicity(star_tree());
    out.rows.push_back(make_row(kName, kv("check", "tree_star") + kv("points", 5), star.delta, 0.0, 0.0, Cmp::Eq));
    const int tree_nodes = cfg.get_int("hyperbolicity.tree_nodes", 60);
    {
        std::mt19937_64 rng(item_seed(ctx.seed, 0x77ee, 0));
        const DeltaResult tr = delta_hyperbolicity(random_tree_metric(tree_nodes, rng));
        out.rows.push_back(make_row(kName, kv("check", "tree_random") + kv("points", tree_nodes), tr.delta, 0.0, 0.0, Cmp::Eq));
    }
    {
        const double d1 = delta_hyperbolicity(circle_sample(1.0, 40)).delta;
        const double d10 = delta_hyperbolicity(circle_sample(10.0, 40)).delta;
        out.rows.push_back(make_row(kName, kv("check", "circle_growth") + kv("R_small", 1) + kv("R_large", 10), d10, d1, 0.0,
                                    Cmp::Ge));
        out.summary["circle_delta"] = {{"R1", d1}, {"R10", d10}};
    }

    const int con_points = cfg.get_int("hyperbolicity.con_points", 300);
    {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xc045, 0));
        const FiniteMetricSample S = con_square_sample(con_points, rng);
        const DeltaResult r = delta_hyperbolicity(S, ctx.seed);
        const double diam = S.matrix().maxCoeff();
        out.rows.push_back(make_row(kName, kv("check", "con_square_finite") + kv("points", con_points) +
                                               kv("tuples", static_cast<double>(r.tuples)),
                                    r.delta, diam, 0.0, Cmp::Le));
        out.summary["con_square"] = {{"delta", r.delta}, {"tuples", r.tuples}, {"exhaustive", r.exhaustive}, {"diameter", diam}};
    }

    const int points = cfg.get_int("hyperbolicity.model_points", 200);
    const double max_depth = cfg.get_double("hyperbolicity.max_depth", 0.2);
    const int helpers = cfg.get_int("hyperbolicity.helpers", 1800);
    const int neighbors = cfg.get_int("hyperbolicity.neighbors", 16);
    const int seeds = cfg.get_int("hyperbolicity.seeds", 3);
    const double stability = cfg.get_double("hyperbolicity.stability", 0.10);
    const FinslerModel M{phi.get(), envelope_constant(cfg, phi->dimension()), cfg.get_double("metric.eps_bar", 0.05),
                         FinslerMode::ModelCenter};
    struct SeedResult {
        double delta = 0.0;
        long long tuples = 0;
        double diam = 0.0;
    };
    const std::vector<SeedResult> sr = parallel_map<SeedResult>(static_cast<std::size_t>(seeds), ctx.jobs, [&](std::size_t s) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xd417, s));
        const FiniteMetricSample S = model_distance_sample(*phi, M, points, max_depth, helpers, neighbors, rng);
        const DeltaResult r = delta_hyperbolicity(S, ctx.seed);
        return SeedResult{r.delta, r.tuples, S.matrix().maxCoeff()};
    });
    double mean = 0.0;
    for (const auto& r : sr) mean += r.delta;
    mean /= std::max(1, seeds);
    nlohmann::ordered_json model = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < sr.size(); ++s) {
        out.rows.push_back(make_row(kName, kv("check", "model_finite") + kv("seed_index", static_cast<double>(s)) +
                                               kv("points", points) + kv("tuples", static_cast<double>(sr[s].tuples)),
                                    sr[s].delta, sr[s].diam, 0.0, Cmp::Le));
        out.rows.push_back(make_row(kName, kv("check", "model_stability") + kv("seed_index", static_cast<double>(s)),
                                    sr[s].delta, mean, stability * mean, Cmp::Eq));
        model.push_back({{"delta", sr[s].delta}, {"tuples", sr[s].tuples}, {"diameter", sr[s].diam}});
    }
    out.summary["model_samples"] = model;
    out.summary["model_delta_mean"] = mean;
    return out;
}

}  // namespace visualmetrics::scenarios
