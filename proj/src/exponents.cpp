#include "fhelm/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fhelm {

std::vector<Rational> rational_grid(const Rational& lo, const Rational& hi, int max_denominator) {
  if (max_denominator < 1) throw DomainError("rational_grid needs max_denominator >= 1");
  std::vector<Rational> out;
  for (std::int64_t b = 1; b <= max_denominator; ++b) {
    const std::int64_t a0 = static_cast<std::int64_t>(std::floor(to_double(lo) * b)) - 1;
    const std::int64_t a1 = static_cast<std::int64_t>(std::ceil(to_double(hi) * b)) + 1;
    for (std::int64_t a = a0; a <= a1; ++a) {
      if (std::gcd(a, b) != 1) continue;
      const Rational r(a, b);
      if (r > lo && r < hi) out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ConsistencyFinding> thm3_consistency_scan(int n, const Rational& s, int max_denominator,
                                                      const Rational& t_max, const Rational& q_max) {
  std::vector<ConsistencyFinding> out;
  const std::vector<Rational> ts = rational_grid(Rational(1), t_max, max_denominator);
  const std::vector<Rational> qs = rational_grid(Rational(1), q_max, max_denominator);
  for (const Rational& t : ts) {
    const QWindow<Rational> w = thm3_q_window(n, s, t);
    if (w.empty) continue;
    for (const Rational& q : qs) {
      if (!(q > w.q_lo && q < w.q_hi)) continue;
      const Rational p = q / t;
      if (!(p > Rational(1))) {
        out.push_back({t, q, w.case_label, w.row, {"p = q/t > 1"}});
        continue;
      }
      const AdmissibilityVerdict v = thm1_admissible(n, s, RationalTriple{p, q, t});
      if (!v.admissible) out.push_back({t, q, w.case_label, w.row, v.failed_conditions});
    }
  }
  return out;
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

Rational rational_from_decimal(double v, std::int64_t max_denominator) {
  if (!std::isfinite(v)) throw DomainError("rational_from_decimal: value is not finite");
  // Continued-fraction convergents until the value is reproduced.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = v;
  for (int i = 0; i < 64; ++i) {
    const double a = std::floor(x);
    const std::int64_t ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0;
    const std::int64_t k2 = ai * k1 + k0;
    if (k2 > max_denominator) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - v) <= 1e-15 * std::max(1.0, std::abs(v)))
      break;
    const double frac = x - a;
    if (frac == 0.0) break;
    x = 1.0 / frac;
  }
  return Rational(h1, k1);
}

}  // namespace fhelm
