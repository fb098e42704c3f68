#pragma once

#include <cmath>
#include <random>

#include "fhelm/grid.hpp"

namespace fhelm::testing {

inline ComplexField random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cplx(nd(rng), nd(rng));
  return f;
}

inline double r2(const Point& x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += x[a] * x[a];
  return s;
}

inline ComplexField gaussian(const Grid& g, double width) {
  const int n = g.dim();
  return ComplexField::sample(g, [&](const Point& x) {
    return cplx(std::exp(-r2(x, n) / (2.0 * width * width)));
  });
}

inline double rel_diff(const ComplexField& a, const ComplexField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace fhelm::testing
