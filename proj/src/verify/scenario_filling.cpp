#include "scenarios.hpp"

#include <cmath>

namespace visualmetrics::scenarios {

namespace {

constexpr const char* kName = "filling-generic";

FiniteMetricSample euclidean_sample(const std::vector<Eigen::VectorXd>& pts) {
    const int m = static_cast<int>(pts.size());
    Eigen::MatrixXd d(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) d(i, j) = i == j ? 0.0 : (pts[i] - pts[j]).norm();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) d(j, i) = d(i, j);
    return FiniteMetricSample(d);
}

// Points on [0,1]: 0 -> x, 1 -> y, 2 -> z.
FiniteMetricSample line_sample(double x, double y, double z) {
    return euclidean_sample({Eigen::VectorXd::Constant(1, x), Eigen::VectorXd::Constant(1, y), Eigen::VectorXd::Constant(1, z)});
}

}  // namespace

ScenarioOutput filling_generic(const Config& cfg, const RunContext& ctx) {
    const int trials = cfg.get_int("filling.trials", 100);
    const int m = cfg.get_int("filling.z_points", 20);
    const int dim = cfg.get_int("filling.dim", 2);
    const double D = cfg.get_double("filling.diam_bound", 2.0);
    const double s_min = cfg.get_double("filling.s_min", 0.05);
    const double s_max = cfg.get_double("filling.s_max", 1.5);
    const int steps = cfg.get_int("bourdon.steps", 12);
    const double tol = cfg.get_double("filling.tol", 1e-6);

    struct Trial {
        double seq = std::nan("");
        double closed = 0.0;
        double s = 0.0;
        std::string error;
    };
    const std::vector<Trial> res = parallel_map<Trial>(static_cast<std::size_t>(trials), ctx.jobs, [&](std::size_t t) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xf111, t));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::vector<Eigen::VectorXd> pts(m);
        for (auto& p : pts) {
            p.resize(dim);
            for (int a = 0; a < dim; ++a) p[a] = u01(rng);
        }
        const FiniteMetricSample Z = euclidean_sample(pts);
        std::uniform_int_distribution<int> pick(0, m - 1);
        const int x = pick(rng);
        int y = pick(rng);
        while (y == x) y = pick(rng);
        const int z = pick(rng);
        Trial tr;
        tr.s = s_min + (s_max - s_min) * u01(rng);
        const FillingPoint o{z, tr.s};
        tr.closed = bourdon_closed_form_con(Z, o, x, y);
        try {
            tr.seq = bourdon_value_con(Z, D, o, x, y, height_schedule(tr.s / 4.0, steps));
        } catch (const Error& e) {
            tr.error = error_name(e.code());
        }
        return tr;
    });

    ScenarioOutput out;
    double worst = 0.0;
    for (std::size_t t = 0; t < res.size(); ++t) {
        std::string params = kv("check", "closed_form") + kv("trial", static_cast<double>(t)) + kv("s", res[t].s);
        if (!res[t].error.empty()) params += kv("error", res[t].error);
        out.rows.push_back(make_row(kName, params, res[t].seq, res[t].closed, tol, Cmp::Eq));
        worst = std::max(worst, std::abs(res[t].seq - res[t].closed));
    }

    // Con([0,1]) example with base (z = 0, s = 0.5).
    {
        const FiniteMetricSample Z = line_sample(0.0, 0.1, 0.0);
        const FillingPoint o{2, 0.5};
        const double v = bourdon_value_con(Z, D, o, 0, 1, height_schedule(0.5 / 4.0, steps));
        out.rows.push_back(make_row(kName, kv("check", "line_example") + kv("x", 0.0) + kv("y", 0.1) + kv("s", 0.5), v,
                                    0.05 / 0.3, tol, Cmp::Eq));
    }
    // Ratio limits s / (d1(x,z) + s)^2 at x = z and away from z.
    for (double x : {0.0, 0.3}) {
        const double z = 0.0, s = 0.5;
        const RatioLimit rl = conformal_ratio_limit(
            [&](std::size_t k, double r) {
                const double y = k == 0 ? x + r : std::abs(x - r);
                const FiniteMetricSample Z = line_sample(x, y, z);
                return std::make_pair(Z(0, 1), bourdon_value_con(Z, D, FillingPoint{2, s}, 0, 1, height_schedule(s / 4.0, steps)));
            },
            x == 0.0 ? 1 : 2, {0.04, 0.02, 0.01, 0.005}, 0.01);
        const double target = s / ((std::abs(x - z) + s) * (std::abs(x - z) + s));
        out.rows.push_back(make_row(kName, kv("check", "ratio_limit") + kv("x", x) + kv("z", z) + kv("s", s), rl.limit,
                                    target, 0.01 * target, Cmp::Eq));
    }
    out.summary["trials"] = trials;
    out.summary["max_abs_error"] = worst;
    return out;
}

}  // namespace visualmetrics::scenarios
