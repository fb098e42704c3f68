#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhelm/grid.hpp"

namespace fhelm {

enum class FamilyKind { gaussian, modulated_gaussian, annulus_bandlimited, bump_compact };

FamilyKind parse_family_kind(const std::string& name);
std::string to_string(FamilyKind kind);

// Seeded family of test fields. Length scales are sigma0 * c / k with
// c running through {0.5, 1, 2, 4} (modulated: {1, 2, 4, 8}), so families
// follow the characteristic wavelength when k changes.
struct TestFamily {
  FamilyKind kind = FamilyKind::gaussian;
  int count = 4;
  std::uint64_t seed = 1;
  double sigma0 = 1.0;
  double annulus_halfwidth = 0.25;  // relative to k, annulus_bandlimited only
  std::vector<double> scales;       // overrides the default c sequence when set

  std::vector<ComplexField> generate(const Grid& grid, double k) const;
};

// Random unit vector in R^n drawn from a seeded normal distribution.
Point random_direction(int n, std::uint64_t seed);

// exp(1 - 1/(1 - (r/a)^2)) for r < a, else 0.
double bump(double r, double a);

}  // namespace fhelm
