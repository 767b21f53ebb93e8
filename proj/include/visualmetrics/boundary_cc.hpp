/**
 * @file boundary_cc.hpp
 * @brief Carnot-Caratheodory distance on the boundary: approximating metrics g_k,
 * Heisenberg model coordinates, horizontal control curves, boundary graphs.
 */
#pragma once

#include "visualmetrics/domain_geometry.hpp"
#include "visualmetrics/invariant_metrics.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace visualmetrics {

// ---------------------------------------------------------------- g_k

struct ApproxMetric {
    const DefiningFunction* phi = nullptr;
    double k = 1.0;
};

/// g_k(p,Z) = (L(p,Z_H) + k^2 |Z_N|^2)^{1/2} for Z tangent at p.
double approx_norm(const ApproxMetric& A, const CVec& p, const CVec& Z);

// ---------------------------------------------------------------- Heisenberg model

/// Levi-orthonormal basis of H_p (columns), so L(p, E w) = |w|^2.
CMat levi_orthonormal_basis(const BoundaryFrame& F);

struct HeisenbergCoords {
    CVec W;        ///< horizontal coordinates in C^{n-1}
    double V = 0;  ///< vertical coordinate
};

HeisenbergCoords heisenberg_coordinates(const DefiningFunction& phi, const CVec& p, const CVec& q);

/// Geodesic w'(s) = a e^{-i omega s}, s in [0,1], reaching (W, V) in the model group.
struct HeisenbergGeodesic {
    CVec a;
    double omega = 0.0;
    double length = 0.0;
};

HeisenbergGeodesic heisenberg_geodesic(const CVec& W, double V);
double heisenberg_distance(const CVec& W, double V);

// ---------------------------------------------------------------- horizontal flow

/// Piecewise-constant ambient controls on [0,1]; the velocity is P_H(gamma) u_i.
struct HorizontalControls {
    CVec start;
    std::vector<CVec> u;
};

struct FlowTrace {
    std::vector<CVec> states;  ///< segment endpoints, size M+1
    double length = 0.0;       ///< sub-Riemannian length of the traced curve
};

FlowTrace horizontal_flow(const DefiningFunction& phi, const HorizontalControls& c, int substeps = 1);

/// Controls of the model geodesic with coefficients a (in the Levi-orthonormal basis) and rate omega.
HorizontalControls heisenberg_controls(const DefiningFunction& phi, const CVec& p, const CVec& a, double omega, int segments);

/// Reverse controls so the curve runs from the old endpoint back to the start.
HorizontalControls reverse_controls(const HorizontalControls& c, const CVec& new_start);

/// Boundary point p + t*i*nu(p) projected back to the boundary (the vertical direction).
CVec vertical_point(const DefiningFunction& phi, const CVec& p, double t);

// ---------------------------------------------------------------- graph

struct BoundaryGraphEdge {
    int i = 0;
    int j = 0;
    std::vector<double> length;  ///< one entry per k in the schedule
};

struct BoundaryGraph {
    int n = 2;
    std::vector<CVec> vertices;
    std::vector<BoundaryGraphEdge> edges;
    std::vector<double> k_values;
    std::uint64_t seed = 0;
    double rho_edge = 0.0;

    /// CSR adjacency: neighbors of v are adj[off[v] .. off[v+1]) as edge indices.
    std::vector<int> off;
    std::vector<int> adj;

    void build_adjacency();
    double mean_degree() const;
};

struct GraphOptions {
    int target_degree = 24;
    int j0 = 2;
    int j1 = -1;  ///< -1: largest j with 2^j <= 1/rho_edge
};

BoundaryGraph build_boundary_graph(const DefiningFunction& phi, int V, std::uint64_t seed, const GraphOptions& opts = {});
void write_boundary_graph(const BoundaryGraph& G, std::ostream& os);
BoundaryGraph read_boundary_graph(std::istream& is, int j0 = 2);

struct GraphPath {
    double length = 0.0;
    std::vector<CVec> nodes;  ///< p, intermediate vertices, q
};

/// Shortest path between arbitrary boundary points under the k-th schedule entry.
GraphPath graph_shortest_path(const DefiningFunction& phi, const BoundaryGraph& G, const CVec& p, const CVec& q, int k_index);

// ---------------------------------------------------------------- distances

struct CcOptions {
    int segments = 48;
    double tol = 1e-11;
    int max_iter = 80;
    const BoundaryGraph* graph = nullptr;
    /// Euclidean separation above which continuation along a boundary path is tried.
    double continuation_threshold = 0.2;
    /// Euclidean separation below which the direct model-geodesic start is tried.
    double direct_threshold = 0.6;
    const HorizontalControls* warm_start = nullptr;
};

struct CcResult {
    double distance = 0.0;
    HorizontalControls controls;
    std::vector<CVec> curve;
    int iterations = 0;
    std::string method;
    double k_max = 0.0;              ///< largest graph k used (0 without a graph)
    int graph_vertices = 0;
    std::vector<double> graph_dk;    ///< Dijkstra d_k per schedule entry
};

CcResult cc_distance(const DefiningFunction& phi, const CVec& p, const CVec& q, const CcOptions& opts = {});

/// Refine controls from a given start to reach q; the result is a locally optimal horizontal curve.
CcResult refine_horizontal(const DefiningFunction& phi, const HorizontalControls& init, const CVec& q, const CcOptions& opts);

/// Sum of L(p_i, Delta_H)^{1/2} at segment midpoints; rejects non-horizontal segments.
double horizontal_length(const DefiningFunction& phi, const DiscreteCurve& alpha, double tau_rel = 1e-3);

struct ApproxDistanceResult {
    double length = 0.0;
    std::vector<CVec> nodes;
};

/// Continuous d_k estimate: energy descent for g_k over boundary polylines from an initial curve.
ApproxDistanceResult approx_distance(const DefiningFunction& phi, double k, const std::vector<CVec>& init_nodes,
                                     int max_iter = 400);

/// d_k for a descending schedule, each solve warm-started from the next larger k.
std::vector<double> approx_distance_schedule(const DefiningFunction& phi, const std::vector<double>& ks,
                                             const std::vector<CVec>& init_nodes);

/// Caching, symmetric wrapper used by the scenarios; warm-starts from cached neighbors.
class CcSolver {
public:
    CcSolver(const DefiningFunction& phi, CcOptions opts = {});
    double distance(const CVec& p, const CVec& q);
    const CcResult& solve(const CVec& p, const CVec& q);
    std::size_t cache_size() const { return cache_.size(); }

private:
    struct Entry {
        CVec a;
        CVec b;
        CcResult res;
    };
    const DefiningFunction& phi_;
    CcOptions opts_;
    std::vector<Entry> cache_;
};

}  // namespace visualmetrics
