#include "fhelm/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhelm/errors.hpp"

namespace fhelm {

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw UsageError("fit_loglog: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  LineFit f;
  const double den = m * sxx - sx * sx;
  if (m < 2 || den <= 0.0) return f;
  f.slope = (m * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double e = std::log(y[i]) - f.intercept - f.slope * std::log(x[i]);
    rss += e * e;
  }
  f.residual = std::sqrt(rss / m);
  return f;
}

FieldSource family_source(const std::vector<TestFamily>& families) {
  if (families.empty()) throw UsageError("no test families given");
  return [families](const Grid& g, double k) {
    std::vector<ComplexField> all;
    for (const auto& fam : families) {
      auto part = fam.generate(g, k);
      for (auto& f : part) all.push_back(std::move(f));
    }
    return all;
  };
}

namespace {

ResolventParams sweep_params(const SweepParams& sw, double lambda, double eps) {
  ResolventParams p;
  p.n = sw.n;
  p.s = sw.s;
  p.lambda = lambda;
  p.epsilon = eps;
  p.allow_outside_window = sw.negative_regime;
  return p;
}

double used_eps(const SweepParams& sw, double lambda, double eps) {
  return sw.eps_relative ? eps * lambda : eps;
}

void check_decay(const SweepParams& sw, double eps, const Grid& g) {
  if (sw.enforce_decay && eps * g.box_length() < 4.0) {
    std::ostringstream os;
    os << "eps * L >= 4 violated: eps = " << eps << ", L = " << g.box_length();
    throw ConfigError(os.str());
  }
}

}  // namespace

EstimateReport opnorm_sweep(const std::vector<TestFamily>& families, const ExponentTriple& triple,
                            const SweepParams& sweep, const Grid& grid) {
  return opnorm_sweep(family_source(families), triple, sweep, grid);
}

EstimateReport opnorm_sweep(const FieldSource& source, const ExponentTriple& triple,
                            const SweepParams& sweep, const Grid& grid) {
  if (sweep.lambdas.empty() || sweep.epsilons.empty())
    throw ConfigError("opnorm sweep needs at least one lambda and one epsilon");
  if (grid.dim() != sweep.n) throw UsageError("opnorm sweep: grid dimension differs from n");
  EstimateReport rep;
  if (!sweep.negative_regime) {
    sweep_params(sweep, sweep.lambdas.front(), 1.0).validate();
    const AdmissibilityVerdict v = thm1_admissible(sweep.n, sweep.s, triple);
    if (!v.admissible) {
      std::string msg = "exponent pair is not admissible:";
      for (const auto& c : v.failed_conditions) msg += " [" + c + " violated]";
      throw ConfigError(msg);
    }
    rep.predicted_slope = scaling_exponent(sweep.n, sweep.s, triple);
  } else {
    rep.predicted_slope = scaling_exponent_raw(sweep.n, sweep.s, triple.p, triple.q);
  }

  std::vector<double> fit_lambda;
  std::vector<double> fit_ratio;
  for (double lambda : sweep.lambdas) {
    const double k = std::pow(lambda, 1.0 / (2.0 * sweep.s));
    const std::vector<ComplexField> members = source(grid, k);
    if (members.empty()) throw UsageError("test family is empty");
    std::vector<double> fnorm(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) fnorm[j] = lp_norm(members[j], triple.p);

    double lo = kInf, hi = 0.0, first = 0.0, last = 0.0;
    for (std::size_t e = 0; e < sweep.epsilons.size(); ++e) {
      const double eps = used_eps(sweep, lambda, sweep.epsilons[e]);
      check_decay(sweep, eps, grid);
      const ResolventParams p = sweep_params(sweep, lambda, eps);
      const ComplexField m = build_multiplier(p, grid);
      SweepCell cell;
      cell.lambda = lambda;
      cell.epsilon = eps;
      for (std::size_t j = 0; j < members.size(); ++j) {
        double r = 0.0;
        if (fnorm[j] > 0.0) r = lp_norm(apply_multiplier(members[j], m), triple.q) / fnorm[j];
        cell.ratios.push_back(r);
        if (r > cell.max_ratio || cell.argmax < 0) {
          cell.max_ratio = std::max(cell.max_ratio, r);
          cell.argmax = static_cast<int>(j);
        }
      }
      lo = std::min(lo, cell.max_ratio);
      hi = std::max(hi, cell.max_ratio);
      if (e == 0) first = cell.max_ratio;
      last = cell.max_ratio;
      rep.cells.push_back(std::move(cell));
    }
    const double var = lo > 0.0 ? (hi - lo) / lo : 0.0;
    rep.eps_variation.push_back(var);
    rep.eps_growth.push_back(first > 0.0 ? last / first : 0.0);
    rep.max_eps_variation = std::max(rep.max_eps_variation, var);
    fit_lambda.push_back(lambda);
    fit_ratio.push_back(last);
    rep.empirical_constant =
        std::max(rep.empirical_constant, last * std::pow(lambda, -rep.predicted_slope));
  }
  if (sweep.epsilons.size() > 1) rep.eps_stable = rep.max_eps_variation <= sweep.eps_tolerance;
  if (sweep.lambdas.size() > 1) {
    rep.lambda_fit = fit_loglog(fit_lambda, fit_ratio);
    rep.slope_ok = std::abs(rep.lambda_fit.slope - rep.predicted_slope) <= sweep.slope_tolerance;
  }
  rep.pass = rep.eps_stable && rep.slope_ok;
  return rep;
}

double local_l2(const ComplexField& u, double R, const std::vector<Point>& centers) {
  require_space(u, Space::physical, "local_l2");
  const Grid& g = u.grid();
  if (!(R >= g.spacing())) throw DomainError("local_l2: R is smaller than one grid cell");
  if (centers.empty()) throw UsageError("local_l2: no centers given");
  const double L = g.box_length();
  const int n = g.dim();
  double best = 0.0;
  for (const Point& c : centers) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.position(i);
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) {
        double d = x[a] - c[a];
        d -= L * std::round(d / L);
        d2 += d * d;
      }
      if (d2 <= R * R) sum += std::norm(u[i]);
    }
    best = std::max(best, std::sqrt(sum * g.cell_volume() / R));
  }
  return best;
}

double local_l2_exponent(int n, double s, double p, bool with_ds) {
  const double e = (n / p - 0.5 * (n - 1)) / (2.0 * s) - 1.0;
  return with_ds ? e + 0.5 : e;
}

LocalL2Report local_l2_sweep(const std::vector<TestFamily>& families, double p,
                             const SweepParams& sweep, const Grid& grid,
                             const std::vector<double>& r_units, double tolerance) {
  if (r_units.empty()) throw ConfigError("local L2 sweep needs at least one radius");
  if (sweep.lambdas.empty() || sweep.epsilons.empty())
    throw ConfigError("local L2 sweep needs lambdas and an epsilon");
  const FieldSource source = family_source(families);
  LocalL2Report rep;
  rep.tolerance = tolerance;
  rep.predicted_u = local_l2_exponent(sweep.n, sweep.s, p, false);
  rep.predicted_ds = local_l2_exponent(sweep.n, sweep.s, p, true);
  for (double lambda : sweep.lambdas) {
    const double eps = used_eps(sweep, lambda, sweep.epsilons.front());
    check_decay(sweep, eps, grid);
    const ResolventParams params = sweep_params(sweep, lambda, eps);
    if (!sweep.negative_regime) params.validate();
    const double k = params.k();
    std::vector<Point> centers(3, Point{});
    centers[1][0] = 1.0 / k;
    if (sweep.n > 1) centers[2][1] = 2.0 / k;
    const ComplexField m = build_multiplier(params, grid);
    double su = 0.0, sd = 0.0;
    for (const ComplexField& f : source(grid, k)) {
      const double fn = lp_norm(f, p);
      if (!(fn > 0.0)) continue;
      const ComplexField u = apply_multiplier(f, m);
      const ComplexField du = apply_ds(u, sweep.s);
      for (double r : r_units) {
        const double R = r / k;
        if (R < 1.0 / std::sqrt(lambda) * (1.0 - 1e-12)) {
          std::ostringstream os;
          os << "local L2 sweep radius R = " << R << " violates R >= 1/sqrt(lambda)";
          throw ConfigError(os.str());
        }
        su = std::max(su, local_l2(u, R, centers) / fn);
        sd = std::max(sd, local_l2(du, R, centers) / fn);
      }
    }
    rep.lambdas.push_back(lambda);
    rep.sup_u.push_back(su);
    rep.sup_ds.push_back(sd);
  }
  rep.fit_u = fit_loglog(rep.lambdas, rep.sup_u);
  rep.fit_ds = fit_loglog(rep.lambdas, rep.sup_ds);
  rep.pass = rep.lambdas.size() > 1 && std::abs(rep.fit_u.slope - rep.predicted_u) <= tolerance &&
             std::abs(rep.fit_ds.slope - rep.predicted_ds) <= tolerance;
  return rep;
}

namespace {

double weighted_kappa(const std::vector<TestFamily>& families, double alpha, double tau,
                      const ResolventParams& params, const Grid& grid) {
  const ComplexField m = build_multiplier(params, grid);
  const double half = 0.5 * grid.box_length();
  const std::vector<double> r = grid.radius();
  double kappa = 0.0;
  for (const ComplexField& f : family_source(families)(grid, params.k())) {
    double inner_max = 0.0, shell_max = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double w = std::pow(1.0 + r[i] * r[i], 0.5 * alpha) * std::abs(f[i]);
      if (r[i] <= 0.5 * half) inner_max = std::max(inner_max, w);
      if (r[i] >= 0.9 * half) shell_max = std::max(shell_max, w);
    }
    if (inner_max == 0.0 && shell_max == 0.0) continue;
    if (shell_max > inner_max)
      throw UsageError("test field decays too slowly for the weight <x>^alpha");
    const double num = weighted_sup_norm(apply_multiplier(f, m), tau);
    kappa = std::max(kappa, num / weighted_sup_norm(f, alpha));
  }
  return kappa;
}

}  // namespace

WeightedReport weighted_estimate_check(const std::vector<TestFamily>& families, double alpha,
                                       const ResolventParams& params, const Grid& grid,
                                       bool continuous_tau, double tolerance) {
  WeightedReport rep;
  rep.alpha = alpha;
  rep.tau = tau_alpha(params.n, alpha, continuous_tau);
  rep.tolerance = tolerance;
  params.validate();
  rep.kappa_coarse = weighted_kappa(families, alpha, rep.tau, params, grid);
  const Grid fine(grid.dim(), 2 * grid.points_per_axis(), grid.box_length());
  rep.kappa_fine = weighted_kappa(families, alpha, rep.tau, params, fine);
  rep.finite = std::isfinite(rep.kappa_coarse) && std::isfinite(rep.kappa_fine);
  const double top = std::max(rep.kappa_coarse, rep.kappa_fine);
  rep.refinement_stable = top == 0.0 || std::abs(rep.kappa_coarse - rep.kappa_fine) <= tolerance * top;
  rep.pass = rep.finite && rep.refinement_stable;
  return rep;
}

ComplexField spherical_wave(const Grid& grid, double k, bool outgoing, double taper_inner,
                            double taper_outer) {
  if (!(k > 0.0)) throw DomainError("spherical_wave needs k > 0");
  if (!(taper_inner > 0.0 && taper_outer > taper_inner))
    throw ConfigError("spherical_wave needs 0 < taper_inner < taper_outer");
  const double sign = outgoing ? 1.0 : -1.0;
  return ComplexField::sample(grid, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
    const double r = std::sqrt(r2);
    // (1 - e^{-r^2}) / r -> r near the origin.
    const double radial = r < 1e-8 ? r : -std::expm1(-r2) / r;
    const double taper = 1.0 - smoothstep7((r - taper_inner) / (taper_outer - taper_inner));
    return radial * taper * std::polar(1.0, sign * k * r);
  });
}

RadiationReport radiation_residual(const ComplexField& u, const ResolventParams& params,
                                   const std::vector<double>& R_list, RadiationMode mode,
                                   double k_override) {
  require_space(u, Space::physical, "radiation_residual");
  const Grid& g = u.grid();
  const int n = g.dim();
  for (double R : R_list)
    if (!(R > 0.0) || R > 0.5 * g.box_length())
      throw DomainError("radiation_residual: every R must lie in (0, L/2]");
  const double k = k_override > 0.0 ? k_override : params.k();
  const double ks = std::pow(k, params.s);
  const std::vector<double> r = g.radius();
  std::vector<double> density(g.size(), 0.0);

  if (mode == RadiationMode::scalar) {
    const ComplexField d = apply_ds(u, params.s);
    for (std::size_t i = 0; i < g.size(); ++i) density[i] = std::norm(d[i] - cplx(0.0, ks) * u[i]);
  } else {
    const std::vector<double> xi = g.frequency_norm();
    for (int a = 0; a < n; ++a) {
      ComplexField m(g, Space::spectral);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (xi[i] == 0.0) continue;
        const double xa = g.frequency(g.unravel(i)[a]);
        m[i] = cplx(0.0, xa * std::pow(xi[i], params.s - 1.0));
      }
      const ComplexField ga = apply_multiplier(u, m);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double dir = r[i] > 0.0 ? g.position(i)[a] / r[i] : 0.0;
        density[i] += std::norm(ga[i] - cplx(0.0, ks * dir) * u[i]);
      }
    }
  }

  RadiationReport rep;
  std::vector<double> radii = R_list;
  std::sort(radii.begin(), radii.end());
  for (double R : radii) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (r[i] <= R) sum += density[i];
    sum *= g.cell_volume();
    rep.rows.push_back({R, sum, sum / R});
  }
  rep.density_decreasing = rep.rows.size() > 1;
  rep.residual_decreasing = rep.rows.size() > 1;
  for (std::size_t j = 1; j < rep.rows.size(); ++j) {
    if (!(rep.rows[j].residual_over_R < rep.rows[j - 1].residual_over_R)) rep.density_decreasing = false;
    if (!(rep.rows[j].residual < rep.rows[j - 1].residual)) rep.residual_decreasing = false;
  }
  return rep;
}

}  // namespace fhelm
