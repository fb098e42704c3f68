#include "fhelm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "fhelm/errors.hpp"

namespace fhelm {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

GmresResult gmres(const LinearMap& A, const Vec& b, const Vec& x0, int restart, int max_restarts,
                  double rtol) {
  if (restart < 1 || max_restarts < 1) throw UsageError("gmres: restart and max_restarts must be >= 1");
  const std::size_t n = b.size();
  GmresResult res;
  res.x = x0.empty() ? Vec(n, 0.0) : x0;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  Vec r(n), w(n);
  for (int cycle = 0; cycle < max_restarts; ++cycle) {
    A(res.x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    double beta = norm2(r);
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= rtol) {
      res.converged = true;
      return res;
    }
    std::vector<Vec> V(1, Vec(n));
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::vector<Vec> H(restart + 1, Vec(restart, 0.0));
    Vec cs(restart, 0.0), sn(restart, 0.0), g(restart + 1, 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < restart; ++j) {
      A(V[j], w);
      ++res.iterations;
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        for (std::size_t k = 0; k < n; ++k) w[k] -= H[i][j] * V[i][k];
      }
      H[j + 1][j] = norm2(w);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double den = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = den > 0.0 ? H[j][j] / den : 1.0;
      sn[j] = den > 0.0 ? H[j + 1][j] / den : 0.0;
      const double hn = H[j + 1][j];
      H[j][j] = den;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      res.rel_residual = std::abs(g[j + 1]) / bnorm;
      if (res.rel_residual <= rtol || hn == 0.0) {
        ++j;
        break;
      }
      V.emplace_back(n);
      for (std::size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] / hn;
    }
    // Back substitution for the least-squares coefficients.
    Vec y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H[i][k] * y[k];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t k = 0; k < n; ++k) res.x[k] += y[i] * V[i][k];
    if (res.rel_residual <= rtol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

namespace {

struct LinePoint {
  double a;
  double f;
  double d;  // directional derivative
};

double cubic_min(const LinePoint& lo, const LinePoint& hi) {
  const double d1 = lo.d + hi.d - 3.0 * (lo.f - hi.f) / (lo.a - hi.a);
  const double disc = d1 * d1 - lo.d * hi.d;
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), hi.a - lo.a);
    const double t = hi.a - (hi.a - lo.a) * (hi.d + d2 - d1) / (hi.d - lo.d + 2.0 * d2);
    const double a = std::min(lo.a, hi.a), b = std::max(lo.a, hi.a);
    if (std::isfinite(t) && t > a + 0.1 * (b - a) && t < b - 0.1 * (b - a)) return t;
  }
  return 0.5 * (lo.a + hi.a);
}

}  // namespace

LbfgsResult lbfgs(const Objective& f, Vec x, const LbfgsOptions& opts, const LbfgsCallback& callback) {
  const std::size_t n = x.size();
  constexpr double c1 = 1e-4, c2 = 0.9;
  LbfgsResult res;
  Vec g(n), d(n), xn(n), gn(n);
  double fx = f(x, g);
  res.evaluations = 1;
  std::deque<Vec> S, Y;
  std::deque<double> rho;
  auto gmax = [](const Vec& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };
  if (!std::isfinite(fx)) throw ConvergenceError("lbfgs: objective is not finite at the start");

  for (int it = 0; it < opts.max_iter; ++it) {
    if (gmax(g) <= opts.grad_tol) {
      res.converged = true;
      res.message = "gradient below tolerance";
      break;
    }
    // Two-loop recursion.
    d = g;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      alpha[i] = rho[i] * dot(S[i], d);
      for (std::size_t k = 0; k < n; ++k) d[k] -= alpha[i] * Y[i][k];
    }
    const double gamma = S.empty() ? 1.0 / std::max(norm2(g), 1e-300) : dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
    for (auto& e : d) e *= gamma;
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = rho[i] * dot(Y[i], d);
      for (std::size_t k = 0; k < n; ++k) d[k] += S[i][k] * (alpha[i] - beta);
    }
    for (auto& e : d) e = -e;
    double d0 = dot(g, d);
    if (!(d0 < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = g;
      const double s = 1.0 / std::max(norm2(g), 1e-300);
      for (auto& e : d) e *= -s;
      d0 = dot(g, d);
    }

    // Strong Wolfe line search (bracketing then zoom).
    auto eval = [&](double a) {
      for (std::size_t k = 0; k < n; ++k) xn[k] = x[k] + a * d[k];
      const double fv = f(xn, gn);
      ++res.evaluations;
      return LinePoint{a, fv, dot(gn, d)};
    };
    LinePoint prev{0.0, fx, d0};
    LinePoint lo{}, hi{};
    bool zoom = false, found = false;
    double a = 1.0;
    LinePoint cur{};
    for (int ls = 0; ls < opts.max_linesearch; ++ls) {
      cur = eval(a);
      if (!std::isfinite(cur.f) || cur.f > fx + c1 * a * d0 || (ls > 0 && cur.f >= prev.f)) {
        lo = prev;
        hi = cur;
        zoom = true;
        break;
      }
      if (std::abs(cur.d) <= -c2 * d0) {
        found = true;
        break;
      }
      if (cur.d >= 0.0) {
        lo = cur;
        hi = prev;
        zoom = true;
        break;
      }
      prev = cur;
      a *= 2.0;
    }
    if (zoom) {
      for (int ls = 0; ls < opts.max_linesearch; ++ls) {
        const double at = std::isfinite(hi.f) ? cubic_min(lo, hi) : 0.5 * (lo.a + hi.a);
        cur = eval(at);
        if (!std::isfinite(cur.f) || cur.f > fx + c1 * at * d0 || cur.f >= lo.f) {
          hi = cur;
        } else {
          if (std::abs(cur.d) <= -c2 * d0) {
            found = true;
            break;
          }
          if (cur.d * (hi.a - lo.a) >= 0.0) hi = lo;
          lo = cur;
        }
        if (std::abs(hi.a - lo.a) < 1e-16 * std::max(1.0, std::abs(lo.a))) break;
      }
      if (!found && lo.a > 0.0 && lo.f < fx) {
        cur = eval(lo.a);
        found = true;
      }
    }
    if (!found) {
      res.message = "line search failed";
      break;
    }
    Vec s(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = xn[k] - x[k];
      y[k] = gn[k] - g[k];
    }
    const double fold = fx;
    x.swap(xn);
    g.swap(gn);
    fx = cur.f;
    res.iterations = it + 1;
    const double sy = dot(s, y);
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    if (callback) callback(res.iterations, x, fx, g);
    if ((fold - fx) <= opts.f_tol * std::max({std::abs(fold), std::abs(fx), 1.0})) {
      res.converged = true;
      res.message = "relative decrease below tolerance";
      break;
    }
  }
  if (res.message.empty()) res.message = "iteration limit reached";
  res.x = std::move(x);
  res.f = fx;
  return res;
}

}  // namespace fhelm
