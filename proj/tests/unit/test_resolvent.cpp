#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "fhelm/errors.hpp"
#include "fhelm/resolvent.hpp"
#include "helpers.hpp"

using namespace fhelm;
using fhelm::testing::rel_diff;

namespace {

// Box of length 2 pi, so lattice frequencies are integer vectors.
Grid unit_lattice(int N = 16) { return Grid(3, N, 2.0 * std::numbers::pi); }

std::size_t mode(const Grid& g, int a, int b, int c) {
  Index idx{};
  const int N = g.points_per_axis();
  idx[0] = (a + N) % N;
  idx[1] = (b + N) % N;
  idx[2] = (c + N) % N;
  return g.ravel(idx);
}

ComplexField plane_wave(const Grid& g, int a, int b, int c) {
  return ComplexField::sample(g, [&](const Point& x) {
    return std::exp(cplx(0.0, a * x[0] + b * x[1] + c * x[2]));
  });
}

}  // namespace

TEST_CASE("multiplier values at chosen frequencies") {
  const Grid g = unit_lattice();
  {
    const ComplexField m = build_multiplier({3, 1.0, 1.0, 0.25}, g);
    CHECK(std::abs(m[mode(g, 1, 0, 0)] - cplx(0.0, 4.0)) < 1e-14);
  }
  const ComplexField m = build_multiplier({3, 1.0, 1.0, 1.0}, g);
  CHECK(std::abs(m[mode(g, 0, 0, 0)] - cplx(-0.5, 0.5)) < 1e-15);
  CHECK(std::abs(m[mode(g, 1, -1, 0)] - cplx(0.5, 0.5)) < 1e-15);
}

TEST_CASE("parameter validation") {
  ResolventParams p{3, 0.7, 1.0, 0.1};
  try {
    p.validate();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("s ≥ n/(n+1)") != std::string::npos);
  }
  p.allow_outside_window = true;
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(ResolventParams({3, 1.0, -1.0, 0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(ResolventParams({3, 1.0, 1.0, 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS(ResolventParams({3, 1.6, 1.0, 0.1}).validate(), ConfigError);
  // Sphere outside the band.
  CHECK_THROWS_AS(build_multiplier({3, 1.0, 100.0, 0.1}, Grid(3, 8, 2.0 * std::numbers::pi)),
                  ConfigError);
}

TEST_CASE("resolvent of a lattice plane wave") {
  const Grid g = unit_lattice();
  const ResolventParams p{3, 0.8, 2.0, 0.3};
  const ComplexField f = plane_wave(g, 2, -1, 3);
  const double a = std::pow(std::sqrt(14.0), 1.6);
  ComplexField expected = f;
  expected *= 1.0 / cplx(a - 2.0, -0.3);
  CHECK(rel_diff(apply_resolvent(f, p), expected) < 1e-12);
  CHECK(lp_norm(apply_resolvent(ComplexField(g), p), 2.0) == 0.0);
}

TEST_CASE("forward operator inverts the resolvent") {
  const Grid g(3, 16, 10.0);
  for (double s : {0.8, 1.0, 1.4}) {
    const ResolventParams p{3, s, 1.0, 0.05};
    const ComplexField f = fhelm::testing::random_field(g, 11);
    CHECK(rel_diff(apply_forward_operator(apply_resolvent(f, p), p), f) < 1e-12);
    CHECK(rel_diff(apply_resolvent(apply_forward_operator(f, p), p), f) < 1e-12);
  }
}

TEST_CASE("cutoff profile") {
  const CutoffSpec phi;
  CHECK(phi(0.0) == 1.0);
  CHECK(phi(0.625) == 1.0);
  CHECK(phi(0.75) == 0.0);
  CHECK(phi(3.0) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = phi(0.625 + 0.125 * i / 100.0);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  CHECK(smoothstep7(0.5) == doctest::Approx(0.5));
}

TEST_CASE("split multiplier partitions m") {
  const Grid g = unit_lattice();
  const ResolventParams p{3, 1.0, 4.0, 0.2};  // k = 2
  const SplitMultiplier sm = split_multiplier(p, CutoffSpec{}, g);
  const ComplexField m = build_multiplier(p, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    worst = std::max(worst, std::abs(sm.m1[i] + sm.m2[i] + sm.m3[i] - m[i]));
  CHECK(worst == 0.0);
  const std::size_t half = mode(g, 1, 0, 0), twice = mode(g, 0, 4, 0);
  CHECK(sm.m3[half] == cplx(0.0));
  CHECK(sm.m1[half] == m[half]);
  CHECK(sm.m3[twice] == cplx(0.0));
  CHECK(sm.m2[twice] == m[twice]);
}

TEST_CASE("fractional derivatives") {
  const Grid g = unit_lattice();
  const ComplexField f = plane_wave(g, 1, 2, 2);  // |xi| = 3
  ComplexField expected = f;
  expected *= std::pow(3.0, 0.7);
  CHECK(rel_diff(apply_ds(f, 0.7), expected) < 1e-12);
  const ComplexField one = ComplexField::sample(g, [](const Point&) { return cplx(1.0); });
  CHECK(lp_norm(apply_ds(one, 0.5), kInf) < 1e-13);
  const ComplexField r = fhelm::testing::random_field(g, 2);
  CHECK(rel_diff(apply_ds(apply_ds(r, 0.9), 0.9), apply_fractional_laplacian(r, 0.9)) < 1e-12);
  CHECK_THROWS_AS(apply_ds(r, -1.0), DomainError);
}

TEST_CASE("eps floor and geometric sequences") {
  const Grid g(3, 64, 32.0);
  CHECK(eps_floor({3, 1.0, 1.0, 0.1}, g) == doctest::Approx(g.freq_spacing()));
  CHECK(eps_floor({3, 0.8, 1.0, 0.1}, g) == doctest::Approx(0.8 * g.freq_spacing()));
  const auto eps = geometric_eps_sequence(0.1, 4);
  REQUIRE(eps.size() == 4);
  CHECK(eps.front() == doctest::Approx(0.8));
  CHECK(eps.back() == doctest::Approx(0.1));
  CHECK_THROWS_AS(geometric_eps_sequence(0.0, 3), ConfigError);
}

TEST_CASE("limiting absorption away from the sphere is exact") {
  const Grid g = unit_lattice();
  const ResolventParams p{3, 1.0, 2.0, 0.1};
  const ComplexField f = plane_wave(g, 2, 1, 0) + plane_wave(g, 0, 0, 3);
  LimitOptions opts;
  opts.enforce_floor = false;
  const LimitResult r = limiting_absorption(f, p, geometric_eps_sequence(0.005, 5), opts);
  const ComplexField expected =
      (1.0 / cplx(3.0)) * plane_wave(g, 2, 1, 0) + (1.0 / cplx(7.0)) * plane_wave(g, 0, 0, 3);
  CHECK(rel_diff(r.u, expected) < 1e-10);
  CHECK(r.report.converged);

  const LimitResult z = limiting_absorption(ComplexField(g), p, {0.4, 0.2, 0.1}, opts);
  CHECK(lp_norm(z.u, 2.0) == 0.0);
  for (double c : z.report.cauchy) CHECK(c == 0.0);
}

TEST_CASE("limiting absorption rejects eps below the floor") {
  const Grid g(3, 16, 8.0);
  const ComplexField f = fhelm::testing::gaussian(g, 1.0);
  CHECK_THROWS_AS(limiting_absorption(f, {3, 1.0, 1.0, 0.1}, {0.2, 0.1, 0.05}), ConfigError);
  CHECK_THROWS_AS(limiting_absorption(f, {3, 1.0, 1.0, 0.1}, {0.1, 0.2}), ConfigError);
}

TEST_CASE("dilation identity on paired grids") {
  const int N = 32;
  const double L = 12.0;
  const ComplexField f = fhelm::testing::random_field(Grid(3, N, L), 4);
  for (double s : {0.8, 1.0, 1.3}) {
    for (double lambda : {2.0, 5.0}) {
      const double k = std::pow(lambda, 1.0 / (2.0 * s));
      const ComplexField u = apply_resolvent(f, {3, s, lambda, 0.3});
      // Same samples on the dilated box represent f(x / k).
      const ComplexField fk(Grid(3, N, k * L), f.values(), Space::physical);
      ComplexField w = apply_resolvent(fk, {3, s, 1.0, 0.3 / lambda});
      w *= 1.0 / lambda;
      CHECK(rel_diff(ComplexField(u.grid(), w.values(), Space::physical), u) < 1e-10);
    }
  }
}
