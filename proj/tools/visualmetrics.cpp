// visualmetrics <scenario> --config <path> [--out <dir>] [--seed <u64>] [--jobs <n>]
#include "visualmetrics/verify_cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    using namespace visualmetrics;
    CLI::App app{"Numerical evidence for boundary metrics of strictly pseudoconvex domains"};
    std::string scenario, config_path, out_dir = "out";
    std::uint64_t seed = 1;
    int jobs = 1;
    app.add_option("scenario", scenario, "Scenario name")->required()->check(CLI::IsMember(scenario_names()));
    app.add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        const Config cfg = Config::load(config_path);
        const RunContext ctx{seed, jobs};
        const auto t0 = std::chrono::steady_clock::now();
        const ScenarioOutput out = run_scenario(scenario, cfg, ctx);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = write_scenario_outputs(scenario, cfg, ctx, out, out_dir, secs);
        std::size_t failed = 0;
        for (const EvidenceRow& r : out.rows) failed += r.pass ? 0 : 1;
        std::printf("%s: %zu rows, %zu failed, %.1f s\n", scenario.c_str(), out.rows.size(), failed, secs);
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
