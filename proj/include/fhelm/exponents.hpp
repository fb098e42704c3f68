#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "fhelm/errors.hpp"

namespace fhelm {

using Rational = boost::rational<std::int64_t>;

// Exact or floating scalar; every routine below is instantiated for both.
template <class T>
struct BasicTriple {
  T p;
  T q;
  std::optional<T> t;
};
using ExponentTriple = BasicTriple<double>;
using RationalTriple = BasicTriple<Rational>;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) {
  return static_cast<double>(v.numerator()) / static_cast<double>(v.denominator());
}

enum class Regime { uniform, no_uniform_estimate };

struct AdmissibilityVerdict {
  bool admissible = false;
  std::vector<std::string> failed_conditions;
  Regime regime = Regime::uniform;
};

inline const char* kGapLower = "1/p - 1/q >= 2/(n+1)";
inline const char* kGapUpper = "1/p - 1/q <= 2s/n";
inline const char* kPRange = "1/p > (n+1)/(2n)";
inline const char* kQRange = "1/q < (n-1)/(2n)";

template <class T>
void require_resolvent_window(int n, const T& s) {
  if (n < 3) throw DomainError("exponent conditions require n >= 3");
  if (!(s > T(0))) throw DomainError("s must be positive");
  if (!(T(2) * s < T(n))) throw DomainError("s < n/2 violated");
}

template <class T>
AdmissibilityVerdict thm1_admissible(int n, const T& s, const BasicTriple<T>& tr) {
  require_resolvent_window(n, s);
  if (!(tr.p > T(1)) || !(tr.q > T(1))) throw DomainError("p and q must exceed 1");
  const T ip = T(1) / tr.p;
  const T iq = T(1) / tr.q;
  const T gap = ip - iq;
  AdmissibilityVerdict v;
  if (!(gap >= T(2) / T(n + 1))) v.failed_conditions.emplace_back(kGapLower);
  if (!(gap <= T(2) * s / T(n))) v.failed_conditions.emplace_back(kGapUpper);
  if (!(ip > T(n + 1) / T(2 * n))) v.failed_conditions.emplace_back(kPRange);
  if (!(iq < T(n - 1) / T(2 * n))) v.failed_conditions.emplace_back(kQRange);
  v.admissible = v.failed_conditions.empty();
  v.regime = s >= T(n) / T(n + 1) ? Regime::uniform : Regime::no_uniform_estimate;
  return v;
}

// One row of a case table: q in (q_lo(t), q_hi(t)) for t in (t_lo, t_hi).
// t_hi is absent for rows unbounded above.
template <class T>
struct WindowRow {
  int row = 0;  // 1-based, in printed order
  T t_lo;
  std::optional<T> t_hi;
  bool crossed = false;  // t_lo >= t_hi: the row is empty for every t
};

template <class T>
struct QWindow {
  std::string case_label;  // "i" .. "v"
  int row = 0;             // 0 when t lies in no row
  T q_lo;
  T q_hi;
  bool empty = true;
  std::vector<int> also_matching;  // further rows whose t-window holds t
};

namespace detail {

// Row kinds for the q-bounds, in terms of (n, s, t).
enum class QBound { n_t1_over_2s, two_nt_over_n1, n1_t1_over_2, two_n_over_n1, t, n1_over_t1 };

template <class T>
T eval_bound(QBound b, int n, const T& s, const T& t) {
  switch (b) {
    case QBound::n_t1_over_2s: return T(n) * (t - T(1)) / (T(2) * s);
    case QBound::two_nt_over_n1: return T(2 * n) * t / T(n + 1);
    case QBound::n1_t1_over_2: return T(n + 1) * (t - T(1)) / T(2);
    case QBound::two_n_over_n1: return T(2 * n) / T(n - 1);
    case QBound::t: return t;
    case QBound::n1_over_t1: return T(n + 1) / (t - T(1));
  }
  return T(0);
}

template <class T>
struct RowSpec {
  T t_lo;
  std::optional<T> t_hi;
  QBound q_lo;
  QBound q_hi;
};

template <class T>
std::vector<RowSpec<T>> case_rows(int n, const T& s, std::string& label) {
  require_resolvent_window(n, s);
  const T N(n);
  const T a = (N + T(1)) * (N + T(1)) / ((N - T(1)) * (N - T(1)));  // (n+1)^2/(n-1)^2
  const T b = (N - T(1) + T(4) * s) / (N - T(1));                    // (n-1+4s)/(n-1)
  const T c = (N * N + T(4) * N - T(1)) / (N * N - T(1));            // (n^2+4n-1)/(n^2-1)
  const T d = T(2) * N / (N - T(1));                                 // 2n/(n-1)
  const T lo_s = N / (N + T(1));
  const T mid_s = (N + T(1)) / T(4);
  const T hi_s = T(2) * N * N / ((N + T(1)) * (N + T(1)));
  using B = QBound;
  std::vector<RowSpec<T>> rows;
  if (s >= lo_s && s < mid_s) {
    const T e = (N + T(1)) / (N + T(1) - T(4) * s);  // (n+1)/(n+1-4s)
    const T sign = N * s - N - s;
    if (sign > T(0)) {
      label = "i";
      rows = {{a, e, B::n_t1_over_2s, B::two_nt_over_n1},
              {b, a, B::n_t1_over_2s, B::n1_t1_over_2},
              {c, b, B::two_n_over_n1, B::n1_t1_over_2}};
    } else if (sign < T(0)) {
      label = "ii";
      rows = {{b, e, B::n_t1_over_2s, B::two_nt_over_n1},
              {a, b, B::two_n_over_n1, B::two_nt_over_n1},
              {c, a, B::two_n_over_n1, B::n1_t1_over_2}};
    }
    return rows;
  }
  const T f = N / (N - T(2) * s);  // n/(n-2s)
  if ((n == 3 || n == 4) && s > mid_s && s < hi_s) {
    label = "iii";
    rows = {{a, std::nullopt, B::n_t1_over_2s, B::two_nt_over_n1},
            {f, a, B::n_t1_over_2s, B::n1_over_t1},
            {d, f, B::t, B::n1_t1_over_2},
            {c, d, B::two_n_over_n1, B::n1_t1_over_2}};
  } else if ((n == 3 || n == 4) && s >= hi_s) {
    label = "iv";
    rows = {{f, std::nullopt, B::n_t1_over_2s, B::two_nt_over_n1},
            {a, f, B::t, B::two_nt_over_n1},
            {d, a, B::t, B::n1_t1_over_2},
            {c, d, B::two_n_over_n1, B::n1_t1_over_2}};
  } else if (n >= 5 && s > mid_s) {
    label = "v";
    rows = {{f, std::nullopt, B::n_t1_over_2s, B::two_nt_over_n1},
            {d, f, B::t, B::two_nt_over_n1},
            {a, d, B::two_n_over_n1, B::two_nt_over_n1},
            {c, a, B::two_n_over_n1, B::n1_t1_over_2}};
  }
  return rows;
}

}  // namespace detail

// The t-windows of the case selected by (n, s).
template <class T>
std::vector<WindowRow<T>> thm3_rows(int n, const T& s, std::string* label = nullptr) {
  std::string lab;
  const auto specs = detail::case_rows(n, s, lab);
  if (specs.empty()) throw DomainError("(n, s) matches none of the five exponent cases");
  if (label) *label = lab;
  std::vector<WindowRow<T>> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    WindowRow<T> r{static_cast<int>(i) + 1, specs[i].t_lo, specs[i].t_hi, false};
    r.crossed = specs[i].t_hi && !(specs[i].t_lo < *specs[i].t_hi);
    out.push_back(r);
  }
  return out;
}

// q-window for (n, s, t): the first row (printed order) whose open t-window holds t.
template <class T>
QWindow<T> thm3_q_window(int n, const T& s, const T& t) {
  QWindow<T> w{};
  const auto specs = detail::case_rows(n, s, w.case_label);
  if (specs.empty()) throw DomainError("(n, s) matches none of the five exponent cases");
  w.q_lo = T(0);
  w.q_hi = T(0);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& r = specs[i];
    if (!(t > r.t_lo) || (r.t_hi && !(t < *r.t_hi))) continue;
    if (w.row == 0) {
      w.row = static_cast<int>(i) + 1;
      w.q_lo = detail::eval_bound(r.q_lo, n, s, t);
      w.q_hi = detail::eval_bound(r.q_hi, n, s, t);
      w.empty = !(w.q_lo < w.q_hi);
    } else {
      w.also_matching.push_back(static_cast<int>(i) + 1);
    }
  }
  return w;
}

// q strictly inside the window for (n, s, t).
template <class T>
bool thm3_contains(int n, const T& s, const T& t, const T& q) {
  const QWindow<T> w = thm3_q_window(n, s, t);
  return !w.empty && q > w.q_lo && q < w.q_hi;
}

template <class T>
T tau_alpha(int n, const T& alpha, bool continuous = false) {
  const T lo = T(n + 1) / T(2);
  if (!(alpha > lo)) throw DomainError("tau(alpha) requires alpha > (n+1)/2");
  if (alpha < T(n)) return alpha - lo;
  return continuous ? T(n - 1) / T(2) : lo;
}

// (n / 2s)(1/p - 1/q) - 1 without the admissibility check.
template <class T>
T scaling_exponent_raw(int n, const T& s, const T& p, const T& q) {
  return T(n) / (T(2) * s) * (T(1) / p - T(1) / q) - T(1);
}

template <class T>
T scaling_exponent(int n, const T& s, const BasicTriple<T>& tr) {
  const AdmissibilityVerdict v = thm1_admissible(n, s, tr);
  if (!v.admissible) {
    std::string msg = "scaling_exponent: inadmissible triple, failed";
    for (const auto& c : v.failed_conditions) msg += " [" + c + "]";
    throw DomainError(msg);
  }
  return scaling_exponent_raw(n, s, tr.p, tr.q);
}

struct ConsistencyFinding {
  Rational t;
  Rational q;
  std::string case_label;
  int row = 0;
  std::vector<std::string> failed_conditions;
};

// Points (t, q) of a rational scan lying in a q-window whose pair (q/t, q)
// fails the resolvent admissibility conditions.
std::vector<ConsistencyFinding> thm3_consistency_scan(int n, const Rational& s, int max_denominator,
                                                      const Rational& t_max, const Rational& q_max);

// Every reduced fraction a/b with b <= max_denominator and lo < a/b < hi.
std::vector<Rational> rational_grid(const Rational& lo, const Rational& hi, int max_denominator);

std::string to_string(const Rational& r);
Rational rational_from_decimal(double v, std::int64_t max_denominator = 1000000);

}  // namespace fhelm
