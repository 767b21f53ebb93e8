// acceptance <k>: runs acceptance criterion k (1..9) and prints one PASS/FAIL line.

#include "visualmetrics/verify_cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

using namespace visualmetrics;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Verdict {
    bool pass = true;
    std::string detail;
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Config config(const std::string& rel) { return Config::load(std::string(VM_CONFIG_DIR) + "/" + rel); }

bool has_check(const EvidenceRow& r, const std::vector<std::string>& checks) {
    const std::string c = param_value(r, "check");
    for (const std::string& k : checks)
        if (c == k) return true;
    return false;
}

// Every selected row must pass; at least `min_count` rows must be selected.
Verdict rows_pass(const std::vector<EvidenceRow>& rows, const std::function<bool(const EvidenceRow&)>& select,
                  std::size_t min_count) {
    Verdict v;
    std::size_t n = 0, failed = 0;
    for (const EvidenceRow& r : rows) {
        if (!select(r)) continue;
        ++n;
        if (!r.pass) {
            ++failed;
            if (failed <= 3)
                std::printf("  failing row: %s measured=%.6g target=%.6g tol=%.3g\n", r.params.c_str(), r.measured,
                            r.target, r.tol);
        }
    }
    v.pass = failed == 0 && n >= min_count;
    v.detail = std::to_string(n - failed) + "/" + std::to_string(n) + " rows pass";
    if (n < min_count) v.detail += " (expected at least " + std::to_string(min_count) + ")";
    return v;
}

Verdict scenario_rows(const std::string& scenario, const std::string& cfg_file, const std::vector<std::string>& checks,
                      std::size_t min_count) {
    const ScenarioOutput out = run_scenario(scenario, config(cfg_file), RunContext{kSeed, jobs()});
    if (checks.empty()) return rows_pass(out.rows, [](const EvidenceRow&) { return true; }, min_count);
    return rows_pass(out.rows, [&](const EvidenceRow& r) { return has_check(r, checks); }, min_count);
}

Verdict criterion(int k) {
    switch (k) {
        case 1: {
            const ScenarioOutput out = run_scenario("conformal-p1", config("conformal-p1.cfg"), RunContext{kSeed, jobs()});
            return rows_pass(
                out.rows,
                [](const EvidenceRow& r) { return has_check(r, {"ratio_limit"}) && param_value(r, "kind") == "random"; },
                20);
        }
        case 2: return scenario_rows("filling-generic", "filling-generic.cfg", {"closed_form"}, 100);
        case 3: return scenario_rows("sandwich", "sandwich.cfg", {"nonincreasing", "final"}, 2);
        case 4: return scenario_rows("lemma-suite", "lemma-suite.cfg", {}, 200);
        case 5: {
            const ScenarioOutput out = run_scenario("boundary-map", config("boundary-map.cfg"), RunContext{kSeed, jobs()});
            for (const EvidenceRow& r : out.rows)
                if (has_check(r, {"chain_product", "chain_bounds_composite"}))
                    std::printf("  info: %s measured=%.6g target=%.6g %s\n", r.params.c_str(), r.measured, r.target,
                                r.pass ? "pass" : "fail");
            return rows_pass(out.rows, [](const EvidenceRow& r) { return has_check(r, {"contains_one", "width", "excludes_one"}); },
                             11);
        }
        case 6: return scenario_rows("bilip-p2", "bilip-p2.cfg", {"audit"}, 1);
        case 7: return scenario_rows("hyperbolicity", "hyperbolicity.cfg", {}, 5);
        case 8: {
            const std::vector<EvidenceRow> rows = oracle_sanity_rows(config("sandwich.cfg"), RunContext{kSeed, 1});
            return rows_pass(rows, [](const EvidenceRow&) { return true; }, 2);
        }
        case 9: {
            Verdict v;
            int same = 0;
            for (const std::string& name : scenario_names()) {
                const Config cfg = config("quick/" + name + ".cfg");
                const std::string a = format_csv(run_scenario(name, cfg, RunContext{kSeed, 1}).rows);
                const std::string b = format_csv(run_scenario(name, cfg, RunContext{kSeed, 2}).rows);
                if (a == b) {
                    ++same;
                } else {
                    v.pass = false;
                    std::printf("  differs: %s\n", name.c_str());
                }
            }
            v.detail = std::to_string(same) + "/" + std::to_string(scenario_names().size()) + " scenarios bit-identical";
            return v;
        }
        default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "criterion must be 1..9");
}

constexpr double kBudgetSeconds[] = {300, 10, 600, 300, 1200, 600, 120, 10, 0};

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..9>\n");
        return 2;
    }
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > 9) {
        std::fprintf(stderr, "criterion must be 1..9\n");
        return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = criterion(k);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double budget = kBudgetSeconds[k - 1];
    std::string timing = "runtime " + std::to_string(secs) + " s";
    if (budget > 0) {
        timing += " (budget " + std::to_string(static_cast<int>(budget)) + " s)";
        if (secs >= budget) v.pass = false;
    }
    std::printf("criterion %d: %s  %s; %s\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str(), timing.c_str());
    return v.pass ? 0 : 1;
}
