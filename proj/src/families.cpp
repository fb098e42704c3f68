#include "fhelm/families.hpp"

#include <cmath>
#include <random>

#include "fhelm/errors.hpp"

namespace fhelm {

FamilyKind parse_family_kind(const std::string& name) {
  if (name == "gaussian") return FamilyKind::gaussian;
  if (name == "modulated_gaussian") return FamilyKind::modulated_gaussian;
  if (name == "annulus_bandlimited") return FamilyKind::annulus_bandlimited;
  if (name == "bump_compact") return FamilyKind::bump_compact;
  throw ConfigError("unknown test family kind '" + name + "'");
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::modulated_gaussian: return "modulated_gaussian";
    case FamilyKind::annulus_bandlimited: return "annulus_bandlimited";
    case FamilyKind::bump_compact: return "bump_compact";
  }
  return "?";
}

Point random_direction(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Point w{};
  double norm = 0.0;
  while (norm < 1e-8) {
    norm = 0.0;
    for (int a = 0; a < n; ++a) {
      w[a] = nd(rng);
      norm += w[a] * w[a];
    }
    norm = std::sqrt(norm);
  }
  for (int a = 0; a < n; ++a) w[a] /= norm;
  return w;
}

double bump(double r, double a) {
  if (!(r < a)) return 0.0;
  const double t = r / a;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

namespace {

double norm2(const Point& x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += x[a] * x[a];
  return s;
}

}  // namespace

std::vector<ComplexField> TestFamily::generate(const Grid& grid, double k) const {
  if (count < 1) throw UsageError("test family is empty");
  if (!(k > 0.0) || !(sigma0 > 0.0)) throw ConfigError("test family needs k > 0 and sigma0 > 0");
  const int n = grid.dim();
  std::vector<ComplexField> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) {
    const double c = !scales.empty()
                         ? scales[static_cast<std::size_t>(j) % scales.size()]
                         : std::ldexp(kind == FamilyKind::modulated_gaussian ? 1.0 : 0.5, j % 4);
    const double width = sigma0 * c / k;
    switch (kind) {
      case FamilyKind::gaussian:
        out.push_back(ComplexField::sample(grid, [&](const Point& x) {
          return cplx(std::exp(-norm2(x, n) / (2.0 * width * width)), 0.0);
        }));
        break;
      case FamilyKind::modulated_gaussian: {
        const Point w = random_direction(n, seed + 7919u * static_cast<std::uint64_t>(j));
        out.push_back(ComplexField::sample(grid, [&](const Point& x) {
          double phase = 0.0;
          for (int a = 0; a < n; ++a) phase += w[a] * x[a];
          return std::exp(-norm2(x, n) / (2.0 * width * width)) *
                 std::exp(cplx(0.0, k * phase));
        }));
        break;
      }
      case FamilyKind::bump_compact:
        out.push_back(ComplexField::sample(grid, [&](const Point& x) {
          return cplx(bump(std::sqrt(norm2(x, n)), 2.0 * width), 0.0);
        }));
        break;
      case FamilyKind::annulus_bandlimited: {
        // Random phases on a smooth radial window around |xi| = k.
        std::mt19937_64 rng(seed + 104729u * static_cast<std::uint64_t>(j));
        std::normal_distribution<double> nd;
        ComplexField F(grid, Space::spectral);
        const std::vector<double> xi = grid.frequency_norm();
        const double hw = annulus_halfwidth * k;
        double total = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
          const cplx z(nd(rng), nd(rng));
          const double d = (xi[i] - k) / hw;
          if (std::abs(d) < 1.0) {
            F[i] = bump(std::abs(d), 1.0) * z;
            total += std::norm(F[i]);
          }
        }
        if (total == 0.0)
          throw ConfigError("annulus_bandlimited family: no lattice frequency in the annulus");
        out.push_back(from_spectrum(F));
        break;
      }
    }
  }
  return out;
}

}  // namespace fhelm
