#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fhelm/dual.hpp"
#include "fhelm/errors.hpp"
#include "fhelm/mountain_pass.hpp"

using namespace fhelm;

namespace {

const ResolventParams kParams{3, 0.9, 1.0, 0.0};

Vec smooth_state(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c0 = u(rng), c1 = u(rng), c2 = u(rng), a = 0.5 + 0.5 * std::abs(u(rng));
  Vec v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point x = g.position(i);
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    v[i] = std::exp(-a * r2 / 4.0) * (1.5 + 0.4 * std::cos(c0 * x[0] + c1 * x[1] + c2 * x[2]));
  }
  return v;
}

}  // namespace

TEST_CASE("exponent window") {
  const DualWindow w = dual_exponent_window(3, 0.9);
  CHECK(w.lo == doctest::Approx(4.0));
  CHECK(w.hi == doctest::Approx(5.0));
  const WeightQ Q(Grid(3, 16, 12.0), WeightSpec{});
  CHECK_THROWS_AS(DualProblem(Q, kParams, 3.5), ConfigError);
  CHECK_NOTHROW(DualProblem(Q, kParams, 3.5, false));
  CHECK_THROWS_AS(DualProblem(Q, kParams, 1.8, false), ConfigError);
}

TEST_CASE("weights") {
  const Grid g(3, 32, 16.0);
  WeightSpec per;
  per.kind = WeightKind::periodic_cell;
  const WeightQ Q(g, per);
  CHECK(Q.periodic());
  CHECK(Q.cell_points() == 8);
  for (double q : Q.samples()) CHECK(q >= 0.0);
  per.cells = 3;
  CHECK_THROWS_AS(WeightQ(g, per), ConfigError);
  CHECK(parse_weight_kind("decaying") == WeightKind::decaying);
  CHECK(to_string(WeightKind::bump_compact) == "bump_compact");
}

TEST_CASE("K_p of a cosine under a constant weight") {
  const Grid g(3, 16, 2.0 * std::numbers::pi);
  WeightSpec spec;
  spec.kind = WeightKind::constant;
  const DualProblem pr(WeightQ(g, spec), {3, 0.9, 1.0, 0.2}, 4.2);
  Vec v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(2.0 * g.position(i)[1]);
  const Vec k = pr.apply_Kp(v);
  const double a = std::pow(2.0, 1.8) - 1.0, e = 0.2;
  const double m1 = a / (a * a + e * e), m2 = a / (a * a + 4.0 * e * e);
  const double expected = (4.0 * m1 - m2) / 3.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(k[i] - expected * v[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("K_p is symmetric") {
  const Grid g(3, 16, 12.0);
  const DualProblem pr(WeightQ(g, WeightSpec{}), kParams, 4.2);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Vec v(g.size()), w(g.size());
    for (auto& x : v) x = nd(rng);
    for (auto& x : w) x = nd(rng);
    const double a = pr.integral(w, pr.apply_Kp(v)), b = pr.integral(v, pr.apply_Kp(w));
    const double scale = pr.norm(v, 2.0) * pr.norm(w, 2.0) * std::abs(pr.real_multiplier()[0]);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(scale, std::abs(a)));
  }
}

TEST_CASE("J and its gradient at zero") {
  const Grid g(3, 16, 12.0);
  const DualProblem pr(WeightQ(g, WeightSpec{}), kParams, 4.2);
  const Vec z(g.size(), 0.0);
  CHECK(pr.eval_J(z) == 0.0);
  CHECK(norm2(pr.grad_J(z)) == 0.0);
  CHECK(norm2(pr.apply_Kp(z)) == 0.0);
  const RecoveredSolution u = recover_u(pr, z, 1e-4);
  CHECK(norm2(u.u) == 0.0);
}

TEST_CASE("J scales as t^{p'} A - t^2 B") {
  const Grid g(3, 16, 12.0);
  const DualProblem pr(WeightQ(g, WeightSpec{}), kParams, 4.2);
  Vec z = smooth_state(g, 2);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= pr.q_root_pp()[i];
  const double pp = pr.p_conjugate();
  const double A = std::pow(pr.norm(z, pp), pp) / pp;
  const double B = 0.5 * pr.integral(z, pr.apply_Kp(z));
  CHECK(B > 0.0);
  for (double t : {0.5, 1.0, 2.0}) {
    Vec tz = z;
    for (auto& x : tz) x *= t;
    const double expected = std::pow(t, pp) * A - t * t * B;
    CHECK(std::abs(pr.eval_J(tz) - expected) <= 1e-10 * std::abs(expected));
  }
  Vec big = z;
  for (auto& x : big) x *= 1e3;
  CHECK(pr.eval_J(big) < 0.0);
}

TEST_CASE("J is even and grad J is odd") {
  const Grid g(3, 16, 12.0);
  const DualProblem pr(WeightQ(g, WeightSpec{}), kParams, 4.2);
  const Vec v = smooth_state(g, 3);
  Vec m = v;
  for (auto& x : m) x = -x;
  CHECK(pr.eval_J(m) == pr.eval_J(v));
  const Vec a = pr.grad_J(v), b = pr.grad_J(m);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == -b[i]);
}

TEST_CASE("grad J matches central differences") {
  const Grid g(3, 16, 12.0);
  const DualProblem pr(WeightQ(g, WeightSpec{}), kParams, 4.2);
  const double delta = 1e-5;
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const Vec v = smooth_state(g, seed), w = smooth_state(g, seed + 100);
    Vec vp = v, vm = v;
    for (std::size_t i = 0; i < v.size(); ++i) {
      vp[i] += delta * w[i];
      vm[i] -= delta * w[i];
    }
    const double fd = (pr.eval_J(vp) - pr.eval_J(vm)) / (2.0 * delta);
    const double an = pr.integral(pr.grad_J(v), w);
    CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
  }
}

TEST_CASE("recentering moves the mass to the central cell") {
  const Grid g(3, 32, 16.0);
  Vec w(g.size(), 0.0);
  Index at{};
  at[0] = 16 + 8;
  at[1] = 16 - 8;
  at[2] = 16;
  w[g.ravel(at)] = 1.0;
  const Index off = recenter_offset(g, w, 8);
  CHECK(off[0] == -8);
  CHECK(off[1] == 8);
  CHECK(off[2] == 0);
}
