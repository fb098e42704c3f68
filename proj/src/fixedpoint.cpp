#include "fhelm/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fhelm/errors.hpp"
#include "fhelm/exponents.hpp"
#include "fhelm/families.hpp"

namespace fhelm {

std::string ContractionTrace::to_json() const {
  // Non-finite numbers serialize as null.
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& r : records)
    iters.push_back({{"iteration", r.iteration}, {"increment", r.increment}, {"ratio", r.ratio},
                     {"residual", r.residual}, {"norm", r.norm}});
  const nlohmann::json j = {{"epsilon", epsilon},
                            {"operator_norm", operator_norm},
                            {"phi_norm", phi_norm},
                            {"ball_radius", ball_radius},
                            {"lipschitz_surrogate", lipschitz_surrogate},
                            {"max_tail_ratio", max_tail_ratio},
                            {"converged", converged},
                            {"iterations", iters}};
  return j.dump();
}

std::optional<double> ball_radius_root(double C, double delta, double t) {
  if (!(C > 0.0) || !(t > 1.0) || delta < 0.0) throw DomainError("ball_radius_root: need C > 0, t > 1, delta >= 0");
  if (delta == 0.0) return 0.0;
  // g(a) = a - C a^t - delta is concave with its max at a_star.
  const double a_star = std::pow(1.0 / (C * t), 1.0 / (t - 1.0));
  auto g = [&](double a) { return a - C * std::pow(a, t) - delta; };
  if (g(a_star) < 0.0) return std::nullopt;
  double lo = 0.0, hi = a_star;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

double measure_operator_norm(const ResolventParams& params, const Grid& grid, double p, double q) {
  const ComplexField m = build_multiplier(params, grid);
  const double k = params.k();
  double best = 0.0;
  for (FamilyKind kind : {FamilyKind::gaussian, FamilyKind::modulated_gaussian}) {
    TestFamily fam{kind, kind == FamilyKind::gaussian ? 4 : 3, 1, 1.0, 0.25, {}};
    for (const ComplexField& f : fam.generate(grid, k)) {
      const double fn = lp_norm(f, p);
      if (fn > 0.0) best = std::max(best, lp_norm(apply_multiplier(f, m), q) / fn);
    }
  }
  return best;
}

ComplexField dealias_two_thirds(const ComplexField& f) {
  require_space(f, Space::physical, "dealias_two_thirds");
  const Grid& g = f.grid();
  const int N = g.points_per_axis();
  ComplexField mask(g, Space::spectral);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index idx = g.unravel(i);
    bool keep = true;
    for (int a = 0; a < g.dim(); ++a)
      if (3 * std::abs(g.wavenumber(idx[a])) > N) keep = false;
    mask[i] = keep ? 1.0 : 0.0;
  }
  return apply_multiplier(f, mask);
}

namespace {

ComplexField power_nonlinearity(const ComplexField& u, double t) {
  ComplexField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    out[i] = a > 0.0 ? std::pow(a, t - 1.0) * u[i] : cplx(0.0);
  }
  return out;
}

double relative(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : kInf;
}

}  // namespace

ContractionResult solve_contraction(const ComplexField& phi, const ResolventParams& params_in,
                                    const ContractionConfig& cfg, const ComplexField* initial) {
  require_space(phi, Space::physical, "solve_contraction");
  const Grid& g = phi.grid();
  if (!(cfg.t > 1.0) || !(cfg.q > 1.0)) throw ConfigError("contraction needs t > 1 and q > 1");
  if (!(cfg.tol > 0.0)) throw ConfigError("contraction tol must be positive");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (cfg.ball_radius < 0.0) throw ConfigError("ball radius must be positive");
  params_in.validate();
  if (cfg.check_window && !thm3_contains<double>(params_in.n, params_in.s, cfg.t, cfg.q)) {
    const QWindow<double> w = thm3_q_window<double>(params_in.n, params_in.s, cfg.t);
    std::ostringstream os;
    os << "q = " << cfg.q << " lies outside the q-window of case (" << w.case_label << ")";
    if (w.row) os << " row " << w.row << ": (" << w.q_lo << ", " << w.q_hi << ")";
    else os << ": t = " << cfg.t << " is in no row";
    throw ConfigError(os.str());
  }
  ResolventParams params = params_in;
  if (cfg.eps_from_floor) params.epsilon = eps_floor(params_in, g);
  const ComplexField m = build_multiplier(params, g);

  ContractionResult res{ComplexField(g), {}, 0.0, 0.0, std::nullopt};
  ContractionTrace& tr = res.trace;
  tr.epsilon = params.epsilon;
  tr.phi_norm = lp_norm(phi, cfg.q);
  tr.operator_norm = measure_operator_norm(params, g, cfg.q / cfg.t, cfg.q);
  const double a_star = std::pow(1.0 / (tr.operator_norm * cfg.t), 1.0 / (cfg.t - 1.0));
  if (cfg.ball_radius > 0.0) {
    tr.ball_radius = cfg.ball_radius;
  } else {
    const auto root = ball_radius_root(tr.operator_norm, tr.phi_norm, cfg.t);
    // Geometric mean of the invariant-ball root and the contraction limit a_star.
    tr.ball_radius = root && *root > 0.0 ? std::sqrt(*root * a_star) : a_star;
  }
  tr.lipschitz_surrogate = cfg.t * tr.operator_norm * std::pow(tr.ball_radius, cfg.t - 1.0);

  auto T = [&](const ComplexField& u) {
    ComplexField nl = power_nonlinearity(u, cfg.t);
    if (cfg.dealias) nl = dealias_two_thirds(nl);
    return phi + apply_multiplier(nl, m);
  };

  ComplexField u = initial ? *initial : ComplexField(g);
  if (initial) require_same_grid(*initial, phi, "solve_contraction");
  double prev_inc = 0.0;
  int stall = 0;
  for (int it = 0;; ++it) {
    const ComplexField Tu = T(u);
    IterationRecord rec;
    rec.iteration = it;
    rec.norm = lp_norm(u, cfg.q);
    rec.residual = relative(lp_norm(u - Tu, cfg.q), rec.norm);
    if (rec.residual <= cfg.tol) {
      tr.records.push_back(rec);
      tr.converged = true;
      res.fixed_point_residual = rec.residual;
      break;
    }
    if (it >= cfg.max_iter) {
      tr.records.push_back(rec);
      throw ConvergenceError("contraction: max_iter reached without meeting tol", tr.to_json());
    }
    ComplexField next = u;
    for (std::size_t i = 0; i < u.size(); ++i) next[i] += cfg.damping * (Tu[i] - u[i]);
    rec.increment = lp_norm(next - u, cfg.q);
    rec.ratio = it > 0 && prev_inc > 0.0 ? rec.increment / prev_inc : 0.0;
    prev_inc = rec.increment;
    tr.records.push_back(rec);
    if (it >= 3) tr.max_tail_ratio = std::max(tr.max_tail_ratio, rec.ratio);
    stall = (it > 0 && rec.ratio >= 1.0) ? stall + 1 : 0;
    if (stall >= cfg.stall_limit) {
      std::ostringstream os;
      os << "non-contraction: increment ratio >= 1 for " << stall
         << " consecutive iterations; surrogate t C a^(t-1) = " << tr.lipschitz_surrogate;
      throw ConvergenceError(os.str(), tr.to_json());
    }
    const double nn = lp_norm(next, cfg.q);
    if (!std::isfinite(nn) || nn > tr.ball_radius) {
      std::ostringstream os;
      os << "iterate left the ball: ||u||_q = " << nn << " > a = " << tr.ball_radius
         << "; surrogate t C a^(t-1) = " << tr.lipschitz_surrogate;
      throw ConvergenceError(os.str(), tr.to_json());
    }
    u = std::move(next);
  }

  const ComplexField nl = power_nonlinearity(u, cfg.t);
  const ComplexField lhs = apply_forward_operator(u - phi, params);
  res.strong_residual = relative(lp_norm(lhs - nl, 2.0), lp_norm(u, 2.0));
  if (cfg.extrapolate_final && lp_norm(nl, kInf) > 0.0) {
    const std::vector<double> eps = geometric_eps_sequence(params.epsilon, 5);
    ResolventParams base = params;
    res.u_limit = phi + limiting_absorption(nl, base, eps).u;
  } else if (cfg.extrapolate_final) {
    res.u_limit = phi;
  }
  res.u = std::move(u);
  return res;
}

ComplexField PointwiseNonlinearity::apply(const ComplexField& u) const {
  require_same_grid(u, Q, "PointwiseNonlinearity");
  ComplexField out = b;
  if (kind == NonlinearityKind::zero) return out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cplx gu = u[i];
    if (kind == NonlinearityKind::saturating) gu /= 1.0 + std::abs(u[i]) / saturation;
    out[i] += Q[i] * gu;
  }
  return out;
}

double PointwiseNonlinearity::weighted_lipschitz(double alpha) const {
  if (kind == NonlinearityKind::zero) return 0.0;
  return weighted_sup_norm(Q, alpha);
}

namespace {

struct SupRun {
  ComplexField u;
  std::vector<IterationRecord> trace;
  bool converged = false;
  double residual = 0.0;
};

SupRun sup_iteration(const ComplexField& phi, const ComplexField& m, const PointwiseNonlinearity& f,
                     double theta, int max_iter, double tol) {
  SupRun run{phi, {}, false, 0.0};
  double prev_inc = 0.0;
  int stall = 0;
  for (int it = 0;; ++it) {
    const ComplexField Tu = phi + apply_multiplier(f.apply(run.u), m);
    IterationRecord rec;
    rec.iteration = it;
    rec.norm = lp_norm(run.u, kInf);
    rec.residual = relative(lp_norm(run.u - Tu, kInf), rec.norm);
    if (rec.residual <= tol) {
      run.trace.push_back(rec);
      run.converged = true;
      run.residual = rec.residual;
      return run;
    }
    if (it >= max_iter || !std::isfinite(rec.residual)) {
      run.trace.push_back(rec);
      run.residual = rec.residual;
      return run;
    }
    ComplexField next = run.u;
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += theta * (Tu[i] - run.u[i]);
    rec.increment = lp_norm(next - run.u, kInf);
    rec.ratio = it > 0 && prev_inc > 0.0 ? rec.increment / prev_inc : 0.0;
    prev_inc = rec.increment;
    run.trace.push_back(rec);
    stall = (it > 0 && rec.ratio >= 1.0) ? stall + 1 : 0;
    run.u = std::move(next);
    if (stall >= 5) {
      run.residual = rec.residual;
      return run;
    }
  }
}

double observed_rate(const std::vector<IterationRecord>& trace, double tol) {
  std::vector<double> r;
  for (const auto& rec : trace)
    if (rec.ratio > 0.0 && rec.residual > 1e3 * tol) r.push_back(rec.ratio);
  if (r.empty()) return 0.0;
  const std::size_t take = std::min<std::size_t>(5, r.size());
  double lg = 0.0;
  for (std::size_t i = r.size() - take; i < r.size(); ++i) lg += std::log(r[i]);
  return std::exp(lg / take);
}

}  // namespace

LipschitzResult solve_lipschitz(const ComplexField& phi, const ResolventParams& params,
                                const PointwiseNonlinearity& f, const LipschitzConfig& cfg) {
  require_space(phi, Space::physical, "solve_lipschitz");
  require_same_grid(phi, f.Q, "solve_lipschitz");
  require_same_grid(phi, f.b, "solve_lipschitz");
  if (!(cfg.tol > 0.0)) throw ConfigError("lipschitz tol must be positive");
  if (!(cfg.fallback_damping > 0.0 && cfg.fallback_damping <= 1.0))
    throw ConfigError("fallback damping must lie in (0, 1]");
  params.validate();
  const double alpha_min = 0.5 * (params.n + 1);
  if (!(cfg.alpha > alpha_min)) throw DomainError("weighted Lipschitz solve requires alpha > (n+1)/2");
  const ComplexField m = build_multiplier(params, phi.grid());

  LipschitzResult res{phi, {}, f.weighted_lipschitz(cfg.alpha), 0.0, false, false, 0.0};
  res.contraction_asserted = cfg.kappa_est > 0.0 && cfg.kappa_est * res.lipschitz_const < cfg.margin;
  SupRun run = sup_iteration(phi, m, f, 1.0, cfg.max_iter, cfg.tol);
  if (!run.converged) {
    res.used_damping = true;
    run = sup_iteration(phi, m, f, cfg.fallback_damping, cfg.max_iter, cfg.tol);
    if (!run.converged) {
      std::ostringstream os;
      os << "fixed-point iteration stagnated with and without damping; residual " << run.residual
         << ", kappa * l_alpha = " << cfg.kappa_est * res.lipschitz_const;
      throw ConvergenceError(os.str());
    }
  }
  res.u = std::move(run.u);
  res.trace = std::move(run.trace);
  res.residual = run.residual;
  res.observed_rate = observed_rate(res.trace, cfg.tol);
  return res;
}

BranchResult continue_branch(const ComplexField& Q, double p_power, const ComplexField& phi,
                             const std::vector<double>& mu_path, const ResolventParams& params,
                             const BranchConfig& cfg) {
  require_same_grid(Q, phi, "continue_branch");
  if (!(p_power > 2.0)) throw ConfigError("branch power p must exceed 2");
  if (mu_path.empty() || mu_path.front() != 0.0) throw ConfigError("branch path must start at 0");
  for (std::size_t i = 1; i < mu_path.size(); ++i)
    if (!(mu_path[i] > mu_path[i - 1])) throw ConfigError("branch path must be increasing");
  for (std::size_t i = 0; i < Q.size(); ++i)
    if (Q[i].real() < 0.0 || Q[i].imag() != 0.0) throw ConfigError("Q must be real and nonnegative");
  params.validate();
  ResolventParams p = params;
  p.epsilon = eps_floor(params, Q.grid());
  const ComplexField m = build_multiplier(p, Q.grid());
  const double phi_sup = lp_norm(phi, kInf);

  auto T = [&](const ComplexField& u, double mu) {
    ComplexField nl(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      nl[i] = a > 0.0 ? Q[i] * std::pow(a, p_power - 2.0) * u[i] : cplx(0.0);
    }
    ComplexField out = apply_multiplier(nl, m);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += mu * phi[i];
    return out;
  };

  BranchResult res;
  res.steps.push_back({0.0, ComplexField(Q.grid()), 0, 0.0, 0.0});
  for (std::size_t s = 1; s < mu_path.size(); ++s) {
    const double mu = mu_path[s];
    const BranchStep& last = res.steps.back();
    ComplexField u = last.u;
    const double dmu = mu - last.mu;
    if (res.steps.size() >= 2) {
      const BranchStep& prev = res.steps[res.steps.size() - 2];
      const double w = dmu / (last.mu - prev.mu);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += w * (last.u[i] - prev.u[i]);
    } else {
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += dmu * phi[i];
    }
    BranchStep step{mu, ComplexField(Q.grid()), 0, kInf, 0.0};
    double prev_res = kInf;
    int growth = 0;
    bool ok = false;
    for (int it = 1; it <= cfg.max_corrector; ++it) {
      ComplexField next = T(u, mu);
      const double r = relative(lp_norm(next - u, kInf), lp_norm(next, kInf));
      u = std::move(next);
      step.corrector_iterations = it;
      step.residual = r;
      if (!std::isfinite(r)) break;
      if (r <= cfg.tol) {
        ok = true;
        break;
      }
      growth = r >= prev_res ? growth + 1 : 0;
      if (growth >= 5) break;
      prev_res = r;
    }
    if (!ok) {
      res.truncated = true;
      std::ostringstream os;
      os << "corrector diverged at mu = " << mu << " (residual " << step.residual << ")";
      res.reason = os.str();
      break;
    }
    step.u = std::move(u);
    step.sup_norm = lp_norm(step.u, kInf);
    if (phi_sup > 0.0 && std::abs(step.sup_norm - last.sup_norm) > cfg.jump_factor * dmu * phi_sup) {
      res.truncated = true;
      std::ostringstream os;
      os << "jump in ||u||_inf at mu = " << mu << " exceeds " << cfg.jump_factor
         << " times the step";
      res.reason = os.str();
      break;
    }
    res.steps.push_back(std::move(step));
  }
  return res;
}

}  // namespace fhelm
