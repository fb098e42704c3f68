#include <doctest.h>

#include <algorithm>

#include "fhelm/errors.hpp"
#include "fhelm/exponents.hpp"

using namespace fhelm;

namespace {
bool has(const AdmissibilityVerdict& v, const char* name) {
  return std::find(v.failed_conditions.begin(), v.failed_conditions.end(), name) !=
         v.failed_conditions.end();
}
}  // namespace

TEST_CASE("resolvent admissibility examples") {
  const auto ok = thm1_admissible<Rational>(3, Rational(1), {Rational(4, 3), Rational(4), {}});
  CHECK(ok.admissible);
  CHECK(ok.failed_conditions.empty());
  CHECK(ok.regime == Regime::uniform);

  const auto bad = thm1_admissible<Rational>(3, Rational(1), {Rational(2), Rational(2), {}});
  CHECK_FALSE(bad.admissible);
  CHECK(has(bad, kGapLower));

  const auto weak = thm1_admissible(3, 0.7, ExponentTriple{1.2, 1.5, {}});
  CHECK(weak.regime == Regime::no_uniform_estimate);
  CHECK_THROWS_AS(thm1_admissible(3, 1.5, ExponentTriple{1.2, 4.0, {}}), DomainError);
  CHECK_THROWS_AS(thm1_admissible(3, 0.0, ExponentTriple{1.2, 4.0, {}}), DomainError);
}

TEST_CASE("boundary classification") {
  // 1/p - 1/q = 2/(n+1) exactly is admitted; 1/q = (n-1)/(2n) exactly is not.
  CHECK(thm1_admissible<Rational>(3, Rational(1), {Rational(10, 7), Rational(5), {}}).admissible);
  const auto edge = thm1_admissible<Rational>(3, Rational(1), {Rational(6, 5), Rational(3), {}});
  CHECK(has(edge, kQRange));
}

TEST_CASE("q-window examples") {
  const auto w = thm3_q_window<Rational>(3, Rational(4, 5), Rational(3));
  CHECK(w.case_label == "ii");
  CHECK(w.row == 1);
  CHECK(w.q_lo == Rational(15, 4));
  CHECK(w.q_hi == Rational(9, 2));
  CHECK_FALSE(w.empty);

  const auto below = thm3_q_window<Rational>(3, Rational(4, 5), Rational(3, 2));
  CHECK(below.row == 0);
  CHECK(below.empty);

  std::string label;
  const auto rows = thm3_rows<Rational>(3, Rational(4, 5), &label);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].t_lo == Rational(4));
  CHECK(*rows[1].t_hi == Rational(13, 5));
  CHECK(rows[1].crossed);

  CHECK(thm3_q_window(3, 1.1, 3.0).case_label == "iii");
  CHECK_THROWS_AS(thm3_q_window(3, 1.0, 3.0), DomainError);  // s = (n+1)/4 lies in no case
  CHECK(thm3_q_window(3, 1.2, 3.0).case_label == "iv");
  CHECK(thm3_q_window(5, 2.0, 3.0).case_label == "v");
  CHECK(thm3_q_window(5, 1.4, 2.0).case_label == "i");
  CHECK_THROWS_AS(thm3_q_window(3, 0.7, 3.0), DomainError);
}

TEST_CASE("tau(alpha)") {
  CHECK(tau_alpha(3, 3.0) == 2.0);
  CHECK(tau_alpha(3, 2.5) == 0.5);
  CHECK(tau_alpha(3, 3.0, true) == 1.0);
  CHECK_THROWS_AS(tau_alpha(3, 2.0), DomainError);
  CHECK(tau_alpha<Rational>(3, Rational(11, 4)) == Rational(3, 4));
}

TEST_CASE("scaling exponent") {
  CHECK(scaling_exponent<Rational>(3, Rational(1), {Rational(4, 3), Rational(4), {}}) ==
        Rational(-1, 4));
  CHECK(scaling_exponent<Rational>(3, Rational(3, 4), {Rational(4, 3), Rational(4), {}}) ==
        Rational(0));
  CHECK(scaling_exponent_raw(3, 1.0, 2.0, 2.0) == -1.0);
  CHECK_THROWS_AS(scaling_exponent(3, 1.0, ExponentTriple{2.0, 2.0, {}}), DomainError);
}

TEST_CASE("rational helpers") {
  CHECK(rational_from_decimal(0.76) == Rational(19, 25));
  CHECK(to_string(Rational(-3, 4)) == "-3/4");
  const auto grid = rational_grid(Rational(0), Rational(1), 4);
  CHECK(grid.size() == 5);  // 1/4 1/3 1/2 2/3 3/4
}

TEST_CASE("verdicts are pure") {
  const RationalTriple tr{Rational(7, 5), Rational(9, 2), {}};
  const auto a = thm1_admissible<Rational>(3, Rational(9, 10), tr);
  const auto b = thm1_admissible<Rational>(3, Rational(9, 10), tr);
  CHECK(a.admissible == b.admissible);
  CHECK(a.failed_conditions == b.failed_conditions);
}
