#include "fhelm/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhelm/errors.hpp"

namespace fhelm {

double ResolventParams::k() const { return std::pow(lambda, 1.0 / (2.0 * s)); }

void ResolventParams::validate() const {
  if (n < 1) throw ConfigError("dimension n must be >= 1");
  if (!(s > 0.0)) throw DomainError("order s must be positive");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!allow_outside_window) {
    const double lo = static_cast<double>(n) / (n + 1);
    if (s < lo) {
      std::ostringstream os;
      os << "s ≥ n/(n+1) violated: s = " << s << " < " << lo
         << " (no uniform resolvent estimate in this regime)";
      throw ConfigError(os.str());
    }
    if (s >= 0.5 * n) {
      std::ostringstream os;
      os << "s < n/2 violated: s = " << s << " >= " << 0.5 * n;
      throw ConfigError(os.str());
    }
  }
  const double kk = k();
  if (!std::isfinite(kk) || !(kk > 0.0)) throw ConfigError("sphere radius k is not finite");
}

double smoothstep7(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t4 = t * t * t * t;
  return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

double CutoffSpec::operator()(double r) const {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  return 1.0 - smoothstep7((r - inner) / (outer - inner));
}

double eps_floor(const ResolventParams& params, const Grid& grid) {
  const double k = params.k();
  const double slope = 2.0 * params.s * std::pow(k, 2.0 * params.s - 1.0);
  return 0.5 * grid.freq_spacing() * std::max(1.0, slope);
}

namespace {

void check_band(const ResolventParams& params, const Grid& grid) {
  params.validate();
  if (grid.dim() != params.n) throw UsageError("grid dimension differs from params.n");
  if (!(grid.nyquist() > params.k())) {
    std::ostringstream os;
    os << "characteristic sphere k = " << params.k() << " lies outside the resolved band "
       << grid.nyquist();
    throw ConfigError(os.str());
  }
}

std::vector<double> symbol(const Grid& grid, double s) {
  std::vector<double> r = grid.frequency_norm();
  for (auto& v : r) v = std::pow(v, 2.0 * s);
  return r;
}

}  // namespace

ComplexField build_multiplier(const ResolventParams& params, const Grid& grid) {
  check_band(params, grid);
  std::vector<double> a = symbol(grid, params.s);
  ComplexField m(grid, Space::spectral);
  for (std::size_t i = 0; i < a.size(); ++i)
    m[i] = 1.0 / cplx(a[i] - params.lambda, -params.epsilon);
  return m;
}

ComplexField apply_resolvent(const ComplexField& f, const ResolventParams& params) {
  require_space(f, Space::physical, "apply_resolvent");
  if (f.grid().dim() != params.n) throw UsageError("apply_resolvent: grid mismatch with params.n");
  return apply_multiplier(f, build_multiplier(params, f.grid()));
}

ComplexField apply_forward_operator(const ComplexField& u, const ResolventParams& params) {
  require_space(u, Space::physical, "apply_forward_operator");
  const Grid& g = u.grid();
  std::vector<double> a = symbol(g, params.s);
  ComplexField m(g, Space::spectral);
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = cplx(a[i] - params.lambda, -params.epsilon);
  return apply_multiplier(u, m);
}

SplitMultiplier split_multiplier(const ResolventParams& params, const CutoffSpec& cutoff,
                                 const Grid& grid) {
  ComplexField m = build_multiplier(params, grid);
  const double k = params.k();
  std::vector<double> xi = grid.frequency_norm();
  SplitMultiplier out{ComplexField(grid, Space::spectral), ComplexField(grid, Space::spectral),
                      ComplexField(grid, Space::spectral)};
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double r = xi[i] / k;
    out.m1[i] = cutoff(r) * m[i];
    out.m2[i] = (1.0 - cutoff(0.5 * r)) * m[i];
    out.m3[i] = m[i] - out.m1[i] - out.m2[i];
  }
  return out;
}

ComplexField apply_ds(const ComplexField& f, double s) {
  if (std::isnan(s) || s < 0.0) throw DomainError("apply_ds requires s >= 0");
  require_space(f, Space::physical, "apply_ds");
  const Grid& g = f.grid();
  std::vector<double> xi = g.frequency_norm();
  ComplexField m(g, Space::spectral);
  for (std::size_t i = 0; i < xi.size(); ++i) m[i] = std::pow(xi[i], s);
  return apply_multiplier(f, m);
}

ComplexField apply_fractional_laplacian(const ComplexField& f, double s) {
  return apply_ds(f, 2.0 * s);
}

std::vector<double> geometric_eps_sequence(double eps_min, int terms, double ratio) {
  if (!(eps_min > 0.0) || terms < 1 || !(ratio > 0.0 && ratio < 1.0))
    throw ConfigError("geometric eps sequence needs eps_min > 0, terms >= 1, 0 < ratio < 1");
  std::vector<double> eps(terms);
  for (int j = 0; j < terms; ++j) eps[j] = eps_min * std::pow(ratio, j - (terms - 1));
  return eps;
}

LimitResult limiting_absorption(const ComplexField& f, const ResolventParams& base,
                                const std::vector<double>& eps_sequence,
                                const LimitOptions& opts) {
  require_space(f, Space::physical, "limiting_absorption");
  const Grid& g = f.grid();
  if (eps_sequence.empty()) throw ConfigError("eps sequence is empty");
  for (std::size_t j = 0; j < eps_sequence.size(); ++j) {
    if (!(eps_sequence[j] > 0.0)) throw ConfigError("eps sequence entries must be positive");
    if (j > 0 && !(eps_sequence[j] < eps_sequence[j - 1]))
      throw ConfigError("eps sequence must be strictly decreasing");
  }
  ResolventParams p = base;
  p.epsilon = eps_sequence.front();
  check_band(p, g);
  const double floor = eps_floor(p, g);
  if (opts.enforce_floor && eps_sequence.back() < floor * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "eps = " << eps_sequence.back() << " is below eps_floor = " << floor
       << " for this grid (near-sphere lattice under-resolved)";
    throw ConfigError(os.str());
  }

  const ComplexField F = to_spectrum(f);
  std::vector<double> a = symbol(g, p.s);
  const std::size_t m = eps_sequence.size();
  std::vector<std::vector<cplx>> T(m, std::vector<cplx>(g.size()));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < g.size(); ++i)
      T[j][i] = F[i] / cplx(a[i] - p.lambda, -eps_sequence[j]);

  LimitResult result{ComplexField(g), {}};
  LimitReport& rep = result.report;
  rep.eps = eps_sequence;
  auto l2 = [](const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
  };
  const double ref = l2(T[0]);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += std::norm(T[j + 1][i] - T[j][i]);
    rep.cauchy.push_back(ref > 0.0 ? std::sqrt(s) / ref : 0.0);
  }
  for (std::size_t j = 1; j < rep.cauchy.size(); ++j)
    if (rep.cauchy[j] > 0.0 && !(rep.cauchy[j] < rep.cauchy[j - 1])) rep.converged = false;

  // Neville tableau evaluated at eps = 0, column by column in place.
  std::vector<cplx> previous;
  for (std::size_t col = 1; col < m; ++col) {
    previous = T[m - 1];
    for (std::size_t j = m - 1; j >= col; --j) {
      const double e_hi = eps_sequence[j - col];
      const double e_lo = eps_sequence[j];
      const double w = 1.0 / (e_hi - e_lo);
      for (std::size_t i = 0; i < g.size(); ++i)
        T[j][i] = (e_hi * T[j][i] - e_lo * T[j - 1][i]) * w;
    }
  }
  if (m > 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += std::norm(T[m - 1][i] - previous[i]);
    const double top = l2(T[m - 1]);
    rep.extrapolation_change = top > 0.0 ? std::sqrt(s) / top : 0.0;
  }
  result.u = from_spectrum(ComplexField(g, std::move(T[m - 1]), Space::spectral));
  return result;
}

}  // namespace fhelm
