/**
 * @file distortion_analysis.hpp
 * @brief Pointwise distortion H*, chain bookkeeping and biLipschitz audits on sampled maps.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace visualmetrics {

/// Sample x_0..x_{N-1} with images F(x_i); distances are evaluated lazily by index.
struct SampledMap {
    std::size_t size = 0;
    std::size_t focal = 0;
    std::function<double(std::size_t, std::size_t)> source_distance;
    std::function<double(std::size_t, std::size_t)> image_distance;
    std::vector<double> focal_coords;        ///< coordinates of x, for composability checks
    std::vector<double> image_focal_coords;  ///< coordinates of F(x)
};

struct RadiusSchedule {
    double r0 = 0.0;  ///< <= 0: 10th percentile of the focal distances
    int annuli = 8;
    int n_min = 30;
};

struct DistortionReport {
    std::vector<double> focal;
    std::vector<double> image_focal;
    std::vector<double> radii;      ///< annulus j is [radii[j+1], radii[j]]
    std::vector<double> sup_ratio;
    std::vector<double> inf_ratio;
    std::vector<int> counts;
    double L = 0.0;
    double l = 0.0;
    double H_star = 1.0;
    double bracket[2] = {1.0, 1.0};

    bool bracket_contains(double v) const { return bracket[0] <= v && v <= bracket[1]; }
    double bracket_width() const { return bracket[1] - bracket[0]; }
    std::string to_json() const;
};

DistortionReport pointwise_distortion(const SampledMap& M, const RadiusSchedule& schedule = {});

struct ChainResult {
    double product = 1.0;
    double measured = 0.0;  ///< H* of the composition, when supplied
    bool holds = true;
};

/// Product of the factors' H*; compares against the composite report if given.
ChainResult chain_distortion_bound(const std::vector<DistortionReport>& chain, const DistortionReport* composite = nullptr,
                                   double tol = 1e-9);

/// Smallest L with d_X / L <= d_Y <= L d_X over (d_X, d_Y) pairs.
double bilipschitz_audit(const std::vector<std::pair<double, double>>& pairs, std::size_t min_pairs = 100);

}  // namespace visualmetrics
