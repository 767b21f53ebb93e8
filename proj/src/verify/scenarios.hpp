// Scenario entry points and helpers shared by the scenario implementations.
#pragma once

#include "visualmetrics/boundary_cc.hpp"
#include "visualmetrics/hyperbolic_boundary.hpp"
#include "visualmetrics/invariant_metrics.hpp"
#include "visualmetrics/verify_cli.hpp"

#include <memory>

namespace visualmetrics::scenarios {

ScenarioOutput sandwich(const Config& cfg, const RunContext& ctx);
ScenarioOutput conformal_p1(const Config& cfg, const RunContext& ctx);
ScenarioOutput bilip_p2(const Config& cfg, const RunContext& ctx);
ScenarioOutput boundary_map(const Config& cfg, const RunContext& ctx);
ScenarioOutput filling_generic(const Config& cfg, const RunContext& ctx);
ScenarioOutput hyperbolicity(const Config& cfg, const RunContext& ctx);
ScenarioOutput lemma_suite(const Config& cfg, const RunContext& ctx);

std::unique_ptr<DefiningFunction> domain_from(const Config& cfg);
CcOptions cc_options_from(const Config& cfg);
CcProvider provider(CcSolver& solver);

/// metric.C from the config, or the ball envelope fit when set to "fit".
double envelope_constant(const Config& cfg, int n);

/// Seed for a work item, independent of scheduling.
std::uint64_t item_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index);

/// Point at Euclidean depth `depth` below the boundary point p.
CVec below(const DefiningFunction& phi, const CVec& p, double depth);

/// Model length distances between sample points through an interior k-nearest-neighbor graph.
FiniteMetricSample model_distance_sample(const DefiningFunction& phi, const FinslerModel& M, int points, double max_depth,
                                         int helpers, int neighbors, std::mt19937_64& rng);

}  // namespace visualmetrics::scenarios
