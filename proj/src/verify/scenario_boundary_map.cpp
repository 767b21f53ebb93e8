#include "scenarios.hpp"

#include "visualmetrics/distortion_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace visualmetrics::scenarios {

namespace {

constexpr const char* kName = "boundary-map";

using BoundaryMap = std::function<CVec(const CVec&)>;

std::vector<double> coords(const CVec& z) {
    std::vector<double> out;
    for (int a = 0; a < z.size(); ++a) {
        out.push_back(z[a].real());
        out.push_back(z[a].imag());
    }
    return out;
}

// Boundary points around p at CC scales log-uniform in [r0 2^-octaves, r0].
std::vector<CVec> sample_around(const DefiningFunction& phi, const CVec& p, double r0, int octaves, int count,
                                std::mt19937_64& rng, int segments) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<CVec> pts;
    for (int i = 0; i < count; ++i) pts.push_back(heisenberg_sample(phi, p, r0 * std::exp2(-octaves * u01(rng)), rng, segments).q);
    return pts;
}

// Distortion of the identity between two focal distance profiles.
DistortionReport profile_report(const std::vector<double>& src, const std::vector<double>& img, const CVec& focal,
                                const CVec& image_focal, int annuli, int n_min) {
    SampledMap M;
    M.size = src.size() + 1;
    M.focal = 0;
    M.source_distance = [&](std::size_t, std::size_t i) { return src[i - 1]; };
    M.image_distance = [&](std::size_t, std::size_t i) { return img[i - 1]; };
    M.focal_coords = coords(focal);
    M.image_focal_coords = coords(image_focal);
    RadiusSchedule sched;
    sched.r0 = *std::max_element(src.begin(), src.end());
    sched.annuli = annuli;
    sched.n_min = n_min;
    return pointwise_distortion(M, sched);
}

struct MapResult {
    std::string label;
    CVec focal;
    DistortionReport report;
    std::string error;
    bool chain = false;
    std::vector<DistortionReport> factors;
    std::string chain_error;
    int closed_form_fallbacks = 0;
};

double gap_to_one(const DistortionReport& R) { return std::max({0.0, R.bracket[0] - 1.0, 1.0 - R.bracket[1]}); }

}  // namespace

ScenarioOutput boundary_map(const Config& cfg, const RunContext& ctx) {
    auto phi = domain_from(cfg);
    const int n = phi->dimension();
    const int focals = cfg.get_int("boundary_map.focal_points", 5);
    const int count = cfg.get_int("boundary_map.points", 360);
    const double r0 = cfg.get_double("boundary_map.r0", 0.2);
    const int annuli = cfg.get_int("boundary_map.annuli", 8);
    const int octaves = cfg.get_int("boundary_map.octaves", annuli + 1);
    const int n_min = cfg.get_int("boundary_map.n_min", 30);
    const double width_tol = cfg.get_double("boundary_map.width", 0.05);
    const double unitary_width = cfg.get_double("boundary_map.unitary_width", 1e-3);
    const double eps_bar = cfg.get_double("metric.eps_bar", 0.05);
    const double omega_scale = cfg.get_double("boundary_map.omega_scale", 0.1);
    const double o_depth = cfg.get_double("boundary_map.o_depth", 0.025);
    const std::vector<double> heights =
        height_schedule(cfg.get_double("bourdon.h0", phi->tubular_cap() / 4.0), cfg.get_int("bourdon.steps", 12));
    CVec a = CVec::Zero(n);
    const std::vector<double> av = cfg.get_doubles("boundary_map.mobius_a", {0.5, 0.0});
    for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k)
        a[k] = {2 * k < av.size() ? av[2 * k] : 0.0, 2 * k + 1 < av.size() ? av[2 * k + 1] : 0.0};
    CcOptions cco = cc_options_from(cfg);
    BoundaryGraph graph;
    const int V = cfg.get_int("graph.vertices", 0);
    if (V > 0) {
        graph = build_boundary_graph(*phi, V, item_seed(ctx.seed, 0x67a9, 0));
        cco.graph = &graph;
    }
    const BallOracle O{n};
    const auto dK = [&](const CVec& x, const CVec& y) { return ball_kobayashi_distance(O, x, y); };

    std::mt19937_64 urng(item_seed(ctx.seed, 0x0417, 0));
    const CMat U = random_unitary(n, urng);
    const BoundaryMap mob = [&](const CVec& z) { return snap_to_boundary(*phi, mobius(a, z)); };
    const BoundaryMap uni = [&](const CVec& z) { return snap_to_boundary(*phi, CVec(U * z)); };
    const BoundaryMap stretch = [&](const CVec& z) { return snap_to_boundary(*phi, stretch_map(z)); };

    // Items: Moebius at each focal point, then the stretch control and the unitary control.
    const std::size_t items = static_cast<std::size_t>(focals) + 2;
    const std::vector<MapResult> res = parallel_map<MapResult>(items, ctx.jobs, [&](std::size_t i) {
        std::mt19937_64 rng(item_seed(ctx.seed, 0xb3a9, i));
        MapResult mr;
        const BoundaryMap* F = &mob;
        if (i < static_cast<std::size_t>(focals)) {
            mr.label = "mobius";
            mr.focal = sample_boundary_point(*phi, rng);
            mr.chain = i == 0;
        } else if (i == static_cast<std::size_t>(focals)) {
            mr.label = "stretch";
            F = &stretch;
            mr.focal = CVec::Zero(n);
            mr.focal[n - 1] = 1.0;
            mr.focal = snap_to_boundary(*phi, mr.focal);
        } else {
            mr.label = "unitary";
            F = &uni;
            mr.focal = sample_boundary_point(*phi, rng);
        }
        const std::vector<CVec> pts = sample_around(*phi, mr.focal, r0, octaves, count, rng, cco.segments);
        const CVec Fp = (*F)(mr.focal);
        std::vector<CVec> Fpts;
        for (const CVec& x : pts) Fpts.push_back((*F)(x));
        CcSolver src_solver(*phi, cco), img_solver(*phi, cco);
        std::vector<double> m1, m6;
        try {
            for (std::size_t k = 0; k < pts.size(); ++k) {
                m1.push_back(src_solver.distance(mr.focal, pts[k]));
                m6.push_back(img_solver.distance(Fp, Fpts[k]));
            }
            mr.report = profile_report(m1, m6, mr.focal, Fp, annuli, n_min);
        } catch (const Error& e) {
            mr.error = error_name(e.code());
            mr.report.bracket[0] = mr.report.bracket[1] = mr.report.H_star = std::nan("");
            return mr;
        }
        if (!mr.chain) return mr;
        try {
            const CVec omega = heisenberg_sample(*phi, mr.focal, omega_scale, rng, cco.segments).q;
            const CVec o = below(*phi, omega, o_depth);
            const CVec fo = mobius(a, o);
            const CcProvider src_cc = provider(src_solver);
            const CcProvider img_cc = provider(img_solver);
            // Kobayashi values fall back to the closed form where the oracle runs out of precision.
            auto rho_k = [&](const CVec& base, const CVec& x, const CVec& y) {
                try {
                    return bourdon_value_interior(*phi, dK, base, x, y, heights);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::NonConvergentSequence) throw;
                    ++mr.closed_form_fallbacks;
                    return ball_bourdon_kobayashi(base, x, y);
                }
            };
            std::vector<double> m2, m3, m4, m5;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                m2.push_back(bourdon_value_g(*phi, src_cc, o, mr.focal, pts[k], heights));
                m3.push_back(rho_k(o, mr.focal, pts[k]));
                m4.push_back(rho_k(fo, Fp, Fpts[k]));
                m5.push_back(bourdon_value_g(*phi, img_cc, fo, Fp, Fpts[k], heights));
            }
            mr.factors.push_back(profile_report(m1, m2, mr.focal, mr.focal, annuli, n_min));
            mr.factors.push_back(profile_report(m2, m3, mr.focal, mr.focal, annuli, n_min));
            mr.factors.push_back(profile_report(m3, m4, mr.focal, Fp, annuli, n_min));
            mr.factors.push_back(profile_report(m4, m5, Fp, Fp, annuli, n_min));
            mr.factors.push_back(profile_report(m5, m6, Fp, Fp, annuli, n_min));
        } catch (const Error& e) {
            mr.chain_error = error_name(e.code());
        }
        return mr;
    });

    ScenarioOutput out;
    nlohmann::ordered_json reports = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < res.size(); ++i) {
        const MapResult& mr = res[i];
        const DistortionReport& R = mr.report;
        std::string params = kv("map", mr.label) + kv("focal_index", static_cast<double>(i)) + kv("H_star", R.H_star) +
                             kv("bracket_lo", R.bracket[0]) + kv("bracket_hi", R.bracket[1]);
        if (!mr.error.empty()) params += kv("error", mr.error);
        if (mr.label == "mobius") {
            out.rows.push_back(make_row(kName, kv("check", "contains_one") + params,
                                        mr.error.empty() ? gap_to_one(R) : std::nan(""), 0.0, 0.0, Cmp::Le));
            out.rows.push_back(make_row(kName, kv("check", "width") + params, R.bracket_width(), width_tol, 0.0, Cmp::Le));
        } else if (mr.label == "stretch") {
            out.rows.push_back(make_row(kName, kv("check", "excludes_one") + params,
                                        mr.error.empty() ? gap_to_one(R) : std::nan(""), std::numeric_limits<double>::min(),
                                        0.0, Cmp::Ge));
        } else {
            out.rows.push_back(make_row(kName, kv("check", "unitary_width") + params, R.bracket_width(), unitary_width, 0.0,
                                        Cmp::Le));
        }
        nlohmann::ordered_json rj = mr.error.empty() ? nlohmann::ordered_json::parse(R.to_json()) : nlohmann::ordered_json::object();
        rj["map"] = mr.label;
        rj["error"] = mr.error;
        reports.push_back(rj);

        if (!mr.chain) continue;
        double product = std::nan(""), measured = std::nan("");
        std::string cparams = kv("focal_index", static_cast<double>(i));
        if (!mr.chain_error.empty() || !mr.error.empty()) {
            cparams += kv("error", mr.chain_error.empty() ? mr.error : mr.chain_error);
        } else {
            try {
                const ChainResult cr = chain_distortion_bound(mr.factors, &R);
                product = cr.product;
                measured = cr.measured;
            } catch (const Error& e) {
                cparams += kv("error", error_name(e.code()));
            }
        }
        out.rows.push_back(make_row(kName, kv("check", "chain_product") + cparams + kv("eps_bar", eps_bar), product,
                                    (1.0 + eps_bar) * (1.0 + eps_bar), 0.0, Cmp::Le));
        out.rows.push_back(make_row(kName, kv("check", "chain_bounds_composite") + cparams + kv("product", product), measured,
                                    product, 1e-9, Cmp::Le));
        nlohmann::ordered_json fj = nlohmann::ordered_json::array();
        for (const DistortionReport& f : mr.factors) fj.push_back(nlohmann::ordered_json::parse(f.to_json()));
        out.summary["chain"] = {{"factors", fj},
                                {"product", product},
                                {"composite_H_star", measured},
                                {"kobayashi_closed_form_fallbacks", mr.closed_form_fallbacks}};
    }
    out.summary["mobius_a"] = av;
    out.summary["points_per_focal"] = count;
    out.summary["r0"] = r0;
    out.summary["reports"] = reports;
    if (V > 0) out.summary["graph"] = {{"vertices", graph.vertices.size()}, {"rho_edge", graph.rho_edge}};
    return out;
}

}  // namespace visualmetrics::scenarios
