#include "visualmetrics/verify_cli.hpp"

#include <cmath>

namespace visualmetrics {

CVec mobius(const CVec& a, const CVec& z) {
    const double aa = a.squaredNorm();
    if (aa == 0.0) return -z;
    const cplx za = herm(z, a);
    const CVec Pz = a * (za / aa);
    const CVec Qz = z - Pz;
    const double s = std::sqrt(1.0 - aa);
    return (a - Pz - s * Qz) / (1.0 - za);
}

CMat random_unitary(int n, std::mt19937_64& rng) {
    CMat G(n, n);
    for (int j = 0; j < n; ++j) G.col(j) = random_complex_gaussian(n, rng);
    Eigen::HouseholderQR<CMat> qr(G);
    CMat Q = qr.householderQ() * CMat::Identity(n, n);
    const CMat R = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
        const cplx d = R(j, j);
        if (std::abs(d) > 0.0) Q.col(j) *= d / std::abs(d);
    }
    return Q;
}

CVec stretch_map(const CVec& z) {
    CVec w = z;
    w[0] = cplx(2.0 * z[0].real(), z[0].imag());
    return w / w.norm();
}

}  // namespace visualmetrics
