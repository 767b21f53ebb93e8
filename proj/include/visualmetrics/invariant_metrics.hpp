/**
 * @file invariant_metrics.hpp
 * @brief Model Finsler metric with envelopes, discrete curves, geodesics and the ball oracle.
 */
#pragma once

#include "visualmetrics/domain_geometry.hpp"

#include <cstdint>
#include <vector>

namespace visualmetrics {

enum class FinslerMode { ModelCenter, LowerEnvelope, UpperEnvelope };

struct FinslerModel {
    const DefiningFunction* phi = nullptr;
    double C = 0.0;
    double eps_bar = 0.05;
    FinslerMode mode = FinslerMode::ModelCenter;
};

/// Depth, foot point and Levi data at an interior point.
struct PointFrame {
    CVec foot;
    double depth = 0.0;
    LeviData levi;
};

PointFrame point_frame(const DefiningFunction& phi, const CVec& x);

double finsler_norm(const FinslerModel& M, const CVec& x, const CVec& Z);
double finsler_norm(const FinslerModel& M, const PointFrame& F, const CVec& Z);
/// Real gradient of K(x, .) at Z, as a complex vector G with dK = Re<dZ, G>.
CVec finsler_norm_gradient(const FinslerModel& M, const PointFrame& F, const CVec& Z);

struct DiscreteCurve {
    std::vector<CVec> nodes;
    std::vector<double> t;

    static DiscreteCurve from_nodes(std::vector<CVec> nodes);
    static DiscreteCurve segment(const CVec& a, const CVec& b, int segments);
    std::size_t segments() const { return nodes.empty() ? 0 : nodes.size() - 1; }
    /// Midpoint subdivision of every segment.
    DiscreteCurve refined() const;
};

double curve_length(const FinslerModel& M, const DiscreteCurve& gamma);

struct GeodesicOptions {
    int segments = 32;
    double grad_tol = 1e-8;
    int max_iter = 10000;
    bool multi_start = false;
    std::uint64_t seed = 0;
};

struct GeodesicResult {
    double length = 0.0;
    DiscreteCurve curve;
    int iterations = 0;
};

GeodesicResult geodesic_distance(const FinslerModel& M, const CVec& x, const CVec& y, const GeodesicOptions& opts = {});

struct BallOracle {
    int n = 2;
};

double ball_kobayashi_distance(const BallOracle& O, const CVec& x, const CVec& y);
double ball_kobayashi_norm(const CVec& z, const CVec& Z);

/// gamma_i = alpha_i - h n(alpha_i), h a Euclidean depth.
DiscreteCurve lift_curve(const DefiningFunction& phi, const DiscreteCurve& alpha, double h);

/// Envelope constant for the unit ball: max |K_exact/K_model - 1| / sqrt(d) over d <= d_max.
double fit_ball_envelope_constant(int n, double d_max, int samples, std::uint64_t seed);

}  // namespace visualmetrics
