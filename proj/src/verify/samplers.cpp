#include "visualmetrics/verify_cli.hpp"

#include <cmath>

namespace visualmetrics {

CVec heisenberg_point(const DefiningFunction& phi, const CVec& p, const CVec& W, double V, double scale, int segments) {
    const HeisenbergGeodesic g = heisenberg_geodesic(scale * W, scale * scale * V);
    const HorizontalControls c = heisenberg_controls(phi, p, g.a, g.omega, segments);
    return horizontal_flow(phi, c).states.back();
}

HeisenbergSample heisenberg_sample(const DefiningFunction& phi, const CVec& p, double scale, std::mt19937_64& rng,
                                   int segments) {
    const int m = phi.dimension() - 1;
    std::uniform_real_distribution<double> angle(-0.5 * M_PI, 0.5 * M_PI);
    CVec W = random_complex_gaussian(m, rng);
    W /= W.norm();
    const double theta = angle(rng);
    W *= std::cos(theta);
    double V = std::sin(theta);
    const double d = heisenberg_distance(W, V);
    HeisenbergSample s;
    s.W = W / d;
    s.V = V / (d * d);
    s.q = heisenberg_point(phi, p, s.W, s.V, scale, segments);
    return s;
}

}  // namespace visualmetrics
