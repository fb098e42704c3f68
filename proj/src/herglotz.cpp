#include "fhelm/herglotz.hpp"

#include <cmath>
#include <numbers>

#include "fhelm/errors.hpp"

namespace fhelm {

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  if (m < 1) throw DomainError("gauss_legendre needs at least one node");
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  const unsigned deg = static_cast<unsigned>(m);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(deg, z);
      const double pm = m > 1 ? std::legendre(deg - 1, z) : 1.0;
      dp = m * (z * p - pm) / (z * z - 1.0);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double p = std::legendre(deg, z);
    const double pm = m > 1 ? std::legendre(deg - 1, z) : 1.0;
    dp = m * (z * p - pm) / (z * z - 1.0);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

SphereQuadrature gauss_product_sphere(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw ConfigError("sphere quadrature needs positive node counts");
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  SphereQuadrature q;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    for (int j = 0; j < n_phi; ++j) {
      const double ph = j * dphi;
      Point p{};
      p[0] = st * std::cos(ph);
      p[1] = st * std::sin(ph);
      p[2] = x[i];
      q.nodes.push_back(p);
      q.weights.push_back(w[i] * dphi);
    }
  }
  return q;
}

namespace {

void check_spec(const HerglotzSpec& spec, const Grid& grid) {
  if (grid.dim() != 3) throw ConfigError("Herglotz waves are implemented for n = 3");
  if (spec.quadrature.nodes.empty() || spec.quadrature.nodes.size() != spec.quadrature.weights.size())
    throw ConfigError("Herglotz quadrature is empty or inconsistent");
  if (!spec.density.empty() && spec.density.size() != spec.quadrature.nodes.size())
    throw ConfigError("Herglotz density length differs from the node count");
  if (!(spec.k > 0.0)) throw ConfigError("Herglotz wavenumber must be positive");
  if (!(spec.k < grid.nyquist())) throw ConfigError("Herglotz wavenumber lies outside the resolved band");
}

}  // namespace

ComplexField herglotz_wave(const HerglotzSpec& spec, const Grid& grid) {
  check_spec(spec, grid);
  const auto& q = spec.quadrature;
  std::vector<cplx> coef(q.nodes.size());
  for (std::size_t j = 0; j < coef.size(); ++j) coef[j] = spec.amplitude * q.weights[j] * spec.density_at(j);
  return ComplexField::sample(grid, [&](const Point& x) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) {
      const auto& w = q.nodes[j];
      const double ph = spec.k * (w[0] * x[0] + w[1] * x[1] + w[2] * x[2]);
      sum += coef[j] * cplx(std::cos(ph), std::sin(ph));
    }
    return sum;
  });
}

double herglotz_symbol_residual(const HerglotzSpec& spec, const ResolventParams& params,
                                const Grid& grid) {
  check_spec(spec, grid);
  const auto& q = spec.quadrature;
  std::vector<cplx> coef(q.nodes.size());
  std::vector<cplx> applied(q.nodes.size());
  for (std::size_t j = 0; j < coef.size(); ++j) {
    const auto& w = q.nodes[j];
    const double len = spec.k * std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    coef[j] = spec.amplitude * q.weights[j] * spec.density_at(j);
    applied[j] = coef[j] * (std::pow(len, 2.0 * params.s) - params.lambda);
  }
  double top = 0.0, res = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.position(i);
    cplx a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) {
      const auto& w = q.nodes[j];
      const cplx e = std::polar(1.0, spec.k * (w[0] * x[0] + w[1] * x[1] + w[2] * x[2]));
      a += coef[j] * e;
      b += applied[j] * e;
    }
    top = std::max(top, std::abs(a));
    res = std::max(res, std::abs(b));
  }
  return top > 0.0 ? res / top : res;
}

}  // namespace fhelm
