/**
 * @file hyperbolic_boundary.hpp
 * @brief Gromov products, four-point hyperbolicity, hyperbolic fillings and Bourdon functions.
 */
#pragma once

#include "visualmetrics/domain_geometry.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace visualmetrics {

/// Finite sample of a (quasi-)metric space.
class FiniteMetricSample {
public:
    FiniteMetricSample() = default;
    /// Checks symmetry and zero diagonal exactly; records the triangle slack.
    explicit FiniteMetricSample(Eigen::MatrixXd d, int base = -1, std::vector<std::string> labels = {});

    int size() const { return static_cast<int>(d_.rows()); }
    double operator()(int i, int j) const { return d_(i, j); }
    const Eigen::MatrixXd& matrix() const { return d_; }
    int base() const { return base_; }
    const std::vector<std::string>& labels() const { return labels_; }
    /// max over triples of d(x,z) - d(x,y) - d(y,z), clipped at 0.
    double triangle_slack() const { return slack_; }

private:
    Eigen::MatrixXd d_;
    int base_ = -1;
    std::vector<std::string> labels_;
    double slack_ = 0.0;
};

/// Text form: "count [base]" on the first line, then one row per point.
FiniteMetricSample read_metric_sample(std::istream& is);
void write_metric_sample(const FiniteMetricSample& S, std::ostream& os);

double gromov_product(const FiniteMetricSample& S, int x, int y, int o);

struct DeltaResult {
    double delta = 0.0;
    long long tuples = 0;
    bool exhaustive = true;
};

/// Smallest delta of the four-point condition; exhaustive up to 400 points, sampled above.
DeltaResult delta_hyperbolicity(const FiniteMetricSample& S, std::uint64_t seed = 0, long long sampled_tuples = 20000000);

// ---------------------------------------------------------------- fillings

/// 2 log((d + max(u,v)) / sqrt(uv)).
double filling_formula(double d, double u, double v);

using CcProvider = std::function<double(const CVec&, const CVec&)>;

/// Hyperbolic filling g with h(x) = sqrt(d_E(x, boundary)).
double filling_metric_g(const DefiningFunction& phi, const CcProvider& cc, const CVec& x, const CVec& y);

/// Point (x, u) of Con(Z) = Z x (0, D), x an index into the Z sample.
struct FillingPoint {
    int x = 0;
    double u = 0.0;
};

double con_filling_distance(const FiniteMetricSample& Z, double diam_bound, const FillingPoint& a, const FillingPoint& b);

// ---------------------------------------------------------------- Bourdon functions

enum class BourdonMethod { SequenceLimit, ClosedForm };
const char* bourdon_method_name(BourdonMethod m);

struct BourdonValue {
    std::string p;
    std::string q;
    double value = 0.0;
    std::string base;
    BourdonMethod method = BourdonMethod::SequenceLimit;
};

/// Filling heights h_i = h0 2^{-i}.
std::vector<double> height_schedule(double h0, int steps = 12);

/// Limit of exp(-product(h_i)), Richardson-extrapolated with the order observed on the last terms.
double bourdon_sequence_limit(const std::function<double(double)>& product_at_height, const std::vector<double>& heights);

/// rho^g_o(p,q) along the diagonal sequences over p and q.
double bourdon_value_g(const DefiningFunction& phi, const CcProvider& cc, const CVec& o, const CVec& p, const CVec& q,
                       const std::vector<double>& heights);

/// rho_o on Con(Z) for boundary points x, y of Z.
double bourdon_value_con(const FiniteMetricSample& Z, double diam_bound, const FillingPoint& o, int x, int y,
                         const std::vector<double>& heights);

/// rho_o for an interior distance, with x_i = p - h_i^2 n(p).
double bourdon_value_interior(const DefiningFunction& phi, const std::function<double(const CVec&, const CVec&)>& dist,
                              const CVec& o, const CVec& p, const CVec& q, const std::vector<double>& heights);

/// d_CC(p,q) h(o) / ((d_CC(p,pi(o)) + h(o)) (d_CC(q,pi(o)) + h(o))).
double bourdon_closed_form_g(const DefiningFunction& phi, const CcProvider& cc, const CVec& o, const CVec& p, const CVec& q);

/// s d1(x,y) / ((d1(x,z) + s)(d1(y,z) + s)) for the base (z, s).
double bourdon_closed_form_con(const FiniteMetricSample& Z, const FillingPoint& o, int x, int y);

/// Kobayashi Bourdon function of the unit ball.
double ball_bourdon_kobayashi(const CVec& o, const CVec& p, const CVec& q);

void write_bourdon_csv(const std::vector<BourdonValue>& rows, std::ostream& os);

/// Smallest tau with rho(p,r) <= tau (rho(p,q) + rho(q,r)) over all triples.
double quasi_triangle_constant(const FiniteMetricSample& S);

// ---------------------------------------------------------------- conformal ratio

/// (d1, d2) at scale r along the given direction.
using ScaledPair = std::function<std::pair<double, double>(std::size_t direction, double r)>;

struct RatioLimit {
    double limit = 0.0;
    double spread = 0.0;  ///< (max - min) / mean over directions
    std::vector<double> per_direction;
};

/// Extrapolated limit of d2/d1 as the scale shrinks; throws on spread or drift above tol.
RatioLimit conformal_ratio_limit(const ScaledPair& eval, std::size_t directions, const std::vector<double>& radii,
                                 double tol = 0.01);

}  // namespace visualmetrics
