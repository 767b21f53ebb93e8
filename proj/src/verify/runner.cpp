#include "scenarios.hpp"

#include "module_hashes.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <tuple>

namespace visualmetrics {

namespace scenarios {

std::unique_ptr<DefiningFunction> domain_from(const Config& cfg) {
    return make_domain(cfg.get_string("domain.name", "ball"), cfg.get_doubles("domain.params", {2.0, 1.0}));
}

CcOptions cc_options_from(const Config& cfg) {
    CcOptions o;
    o.segments = cfg.get_int("cc.segments", o.segments);
    o.tol = cfg.get_double("cc.tol", o.tol);
    o.max_iter = cfg.get_int("cc.max_iter", o.max_iter);
    return o;
}

CcProvider provider(CcSolver& solver) {
    return [&solver](const CVec& p, const CVec& q) { return solver.distance(p, q); };
}

double envelope_constant(const Config& cfg, int n) {
    const std::string v = cfg.get_string("metric.C", "fit");
    if (v != "fit") return cfg.get_double("metric.C", 0.0);
    const double d_max = cfg.get_double("metric.fit_d_max", 0.05);
    const int samples = cfg.get_int("metric.fit_samples", 20000);
    static std::mutex mu;
    static std::map<std::tuple<int, double, int>, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_tuple(n, d_max, samples);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, fit_ball_envelope_constant(n, d_max, samples, 0xc0ffee)).first;
    return it->second;
}

std::uint64_t item_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ salt) ^ index);
}

CVec below(const DefiningFunction& phi, const CVec& p, double depth) { return p - depth * complex_normal(phi, p); }

}  // namespace scenarios

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"sandwich",        "conformal-p1",  "bilip-p2",   "boundary-map",
                                                "filling-generic", "hyperbolicity", "lemma-suite"};
    return names;
}

ScenarioOutput run_scenario(const std::string& name, const Config& cfg, const RunContext& ctx) {
    using Fn = ScenarioOutput (*)(const Config&, const RunContext&);
    static const std::map<std::string, Fn> table{
        {"sandwich", scenarios::sandwich},           {"conformal-p1", scenarios::conformal_p1},
        {"bilip-p2", scenarios::bilip_p2},           {"boundary-map", scenarios::boundary_map},
        {"filling-generic", scenarios::filling_generic}, {"hyperbolicity", scenarios::hyperbolicity},
        {"lemma-suite", scenarios::lemma_suite},
    };
    auto it = table.find(name);
    if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
    return it->second(cfg, ctx);
}

const std::vector<std::pair<std::string, std::string>>& module_hashes() {
    static const std::vector<std::pair<std::string, std::string>> hashes(std::begin(kModuleHashes), std::end(kModuleHashes));
    return hashes;
}

bool write_scenario_outputs(const std::string& name, const Config& cfg, const RunContext& ctx, const ScenarioOutput& out,
                            const std::string& dir, double runtime_seconds) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base = std::filesystem::path(dir) / name;
    {
        std::ofstream csv(base.string() + ".csv", std::ios::binary);
        if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write " + base.string() + ".csv");
        csv << format_csv(out.rows);
    }
    std::size_t passed = 0;
    for (const EvidenceRow& r : out.rows) passed += r.pass ? 1 : 0;
    const bool all = passed == out.rows.size();

    nlohmann::ordered_json j;
    j["scenario"] = name;
    j["seed"] = ctx.seed;
    j["jobs"] = ctx.jobs;
    j["rows"] = out.rows.size();
    j["passed"] = passed;
    j["failed"] = out.rows.size() - passed;
    j["all_pass"] = all;
    j["runtime_seconds"] = runtime_seconds;
    j["config"] = cfg.text();
    nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
    for (const auto& [mod, h] : module_hashes()) hashes[mod] = h;
    j["module_hashes"] = hashes;
    j["summary"] = out.summary;
    std::ofstream js(base.string() + ".json", std::ios::binary);
    if (!js) throw Error(ErrorCode::InvalidArgument, "cannot write " + base.string() + ".json");
    js << j.dump(2) << '\n';
    return all;
}

}  // namespace visualmetrics
