/**
 * @file types.hpp
 * @brief Small fixed-capacity vector types and the library error type.
 */
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace visualmetrics {

using cplx = std::complex<double>;

// Complex dimension cap for the inline-storage vector types.
inline constexpr int kMaxDim = 4;

using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxDim, 1>;
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2 * kMaxDim, 2 * kMaxDim>;

enum class ErrorCode {
    NoConvergence,
    OutsideTubular,
    NotInDomain,
    NotStrictlyPseudoconvex,
    DegenerateBoundary,
    NotTangent,
    GraphDisconnected,
    NotHorizontal,
    TooFewPoints,
    HeightOutOfRange,
    NonConvergentSequence,
    NonConvergent,
    DirectionalMismatch,
    InsufficientSamples,
    NotComposable,
    QuantifierSearchFailed,
    InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, long index = -1)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code), index_(index) {}

    ErrorCode code() const { return code_; }
    // Offending segment/annulus index when applicable, else -1.
    long index() const { return index_; }

private:
    ErrorCode code_;
    long index_;
};

inline RVec to_real(const CVec& z) {
    RVec x(2 * z.size());
    for (Eigen::Index a = 0; a < z.size(); ++a) {
        x[2 * a] = z[a].real();
        x[2 * a + 1] = z[a].imag();
    }
    return x;
}

inline CVec to_complex(const RVec& x) {
    CVec z(x.size() / 2);
    for (Eigen::Index a = 0; a < z.size(); ++a) z[a] = cplx(x[2 * a], x[2 * a + 1]);
    return z;
}

// Hermitian inner product <z,w> = sum z_a conj(w_a).
inline cplx herm(const CVec& z, const CVec& w) {
    cplx s = 0.0;
    for (Eigen::Index a = 0; a < z.size(); ++a) s += z[a] * std::conj(w[a]);
    return s;
}

// Real inner product of the underlying R^{2n} vectors.
inline double real_dot(const CVec& z, const CVec& w) { return herm(z, w).real(); }

}  // namespace visualmetrics
