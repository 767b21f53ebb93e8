/**
 * @file domain_geometry.hpp
 * @brief Defining functions, nearest-point projection, boundary frames and Levi data.
 */
#pragma once

#include "visualmetrics/types.hpp"

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace visualmetrics {

enum class DerivativeSource { Analytic, FiniteDifference };

/// Smooth real function on C^n with D = {phi < 0}.
class DefiningFunction {
public:
    explicit DefiningFunction(int n);
    virtual ~DefiningFunction() = default;

    int dimension() const { return n_; }

    virtual std::string name() const = 0;
    virtual std::vector<double> parameters() const = 0;

    virtual double value(const CVec& z) const = 0;
    /// Real gradient in the ordering (x_1, y_1, ..., x_n, y_n).
    virtual RVec gradient(const CVec& z) const;
    virtual RMat real_hessian(const CVec& z) const;
    virtual DerivativeSource derivative_source() const { return DerivativeSource::FiniteDifference; }

    /// d^2 phi / dz_a dzbar_b, symmetrized to be Hermitian.
    CMat complex_hessian(const CVec& z) const;
    /// d^2 phi / dzbar_a dzbar_b.
    CMat complex_hessian_bar(const CVec& z) const;

    /// Upper bound on any admissible tubular radius (the inradius for built-ins).
    virtual double tubular_cap() const = 0;
    /// Point the domain is star-shaped about.
    virtual CVec center() const;
    virtual RVec box_lo() const = 0;
    virtual RVec box_hi() const = 0;

    /// Closed-form nearest boundary point, if the domain has one.
    virtual bool exact_projection(const CVec& x, CVec& p) const;

protected:
    int n_;
};

/// phi = |z| - R.
class BallFunction final : public DefiningFunction {
public:
    BallFunction(int n, double radius = 1.0);
    std::string name() const override { return "ball"; }
    std::vector<double> parameters() const override { return {static_cast<double>(n_), radius_}; }
    double value(const CVec& z) const override;
    RVec gradient(const CVec& z) const override;
    RMat real_hessian(const CVec& z) const override;
    DerivativeSource derivative_source() const override { return DerivativeSource::Analytic; }
    double tubular_cap() const override { return radius_; }
    RVec box_lo() const override;
    RVec box_hi() const override;
    bool exact_projection(const CVec& x, CVec& p) const override;
    double radius() const { return radius_; }

private:
    double radius_;
};

/// phi = sum a_k |z_k|^2 - 1.
class EllipsoidFunction final : public DefiningFunction {
public:
    explicit EllipsoidFunction(std::vector<double> a);
    std::string name() const override { return "ellipsoid"; }
    std::vector<double> parameters() const override { return a_; }
    double value(const CVec& z) const override;
    RVec gradient(const CVec& z) const override;
    RMat real_hessian(const CVec& z) const override;
    DerivativeSource derivative_source() const override { return DerivativeSource::Analytic; }
    double tubular_cap() const override;
    RVec box_lo() const override;
    RVec box_hi() const override;
    const std::vector<double>& coefficients() const { return a_; }

private:
    std::vector<double> a_;
};

/// User-supplied value only; derivatives by central differences.
class ImplicitFunction final : public DefiningFunction {
public:
    ImplicitFunction(int n, std::function<double(const CVec&)> f, double cap, double box_half_width);
    std::string name() const override { return "implicit"; }
    std::vector<double> parameters() const override { return {cap_, half_}; }
    double value(const CVec& z) const override { return f_(z); }
    double tubular_cap() const override { return cap_; }
    RVec box_lo() const override;
    RVec box_hi() const override;

private:
    std::function<double(const CVec&)> f_;
    double cap_;
    double half_;
};

/// Build a built-in domain from a config name and parameter list.
std::unique_ptr<DefiningFunction> make_domain(const std::string& name, const std::vector<double>& params);

struct Projection {
    CVec point;
    double distance = 0.0;         ///< d_E(x, boundary)
    double signed_distance = 0.0;  ///< sign of phi(x)
    int iterations = 0;
};

struct BoundaryFrame {
    CVec point;
    RVec normal;           ///< outward unit normal in R^{2n}
    CVec complex_normal;   ///< same vector viewed in C^n
    CMat P_H;
    CMat P_N;
    CMat levi;             ///< normalized complex Hessian on C^n
    CMat horizontal_basis; ///< n x (n-1), orthonormal columns spanning H_p
    CMat levi_H;           ///< levi restricted to horizontal_basis
    double grad_norm = 1.0;

    CVec horizontal(const CVec& Z) const { return P_H * Z; }
    CVec normal_part(const CVec& Z) const { return P_N * Z; }
    /// L(p, Z) = Re(Z^T C conj(Z)) with C normalized by |grad phi(p)|.
    double levi_form(const CVec& Z) const;
};

/// Normal and normalized Levi matrix at a boundary point, without the positivity check.
struct LeviData {
    CVec nu;
    CMat levi;
    double grad_norm = 1.0;
};

struct TubularNeighborhood {
    double radius = 0.0;
    const DefiningFunction* phi = nullptr;
};

Projection project_to_boundary(const DefiningFunction& phi, const CVec& x);
double signed_distance(const DefiningFunction& phi, const CVec& x);
double height(const DefiningFunction& phi, const CVec& x);

BoundaryFrame boundary_frame(const DefiningFunction& phi, const CVec& p);
LeviData levi_data(const DefiningFunction& phi, const CVec& p);
CVec complex_normal(const DefiningFunction& phi, const CVec& x);

TubularNeighborhood estimate_tubular_radius(const DefiningFunction& phi, int samples, std::uint64_t seed);

/// Random boundary point: Gaussian direction from the center, then a ray solve for phi = 0.
CVec sample_boundary_point(const DefiningFunction& phi, std::mt19937_64& rng);
/// Boundary point on the ray center + t*dir.
CVec ray_to_boundary(const DefiningFunction& phi, const CVec& dir);
/// Newton steps along the gradient until |phi| is at round-off.
CVec snap_to_boundary(const DefiningFunction& phi, const CVec& x);

CVec random_complex_gaussian(int n, std::mt19937_64& rng);

}  // namespace visualmetrics
