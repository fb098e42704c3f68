#pragma once

#include <vector>

#include "fhelm/grid.hpp"
#include "fhelm/resolvent.hpp"

namespace fhelm {

// Nodes and positive weights on the unit sphere S^2.
struct SphereQuadrature {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre in cos(theta) times a uniform rule in the azimuth.
SphereQuadrature gauss_product_sphere(int n_theta = 17, int n_phi = 35);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w);

struct HerglotzSpec {
  SphereQuadrature quadrature;
  std::vector<cplx> density;  // h(omega_j); empty means h = 1
  double k = 1.0;
  double amplitude = 1.0;

  cplx density_at(std::size_t j) const { return density.empty() ? cplx(1.0) : density[j]; }
};

// phi(x) = amplitude * sum_j w_j h(omega_j) exp(i k omega_j . x).
ComplexField herglotz_wave(const HerglotzSpec& spec, const Grid& grid);

// max |sum_j w_j h_j (|k omega_j|^{2s} - lambda) e^{i k omega_j . x}| / max |phi|,
// the symbol applied analytically to each plane wave.
double herglotz_symbol_residual(const HerglotzSpec& spec, const ResolventParams& params,
                                const Grid& grid);

}  // namespace fhelm
