#include "fhelm/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fhelm/errors.hpp"

namespace fhelm {

namespace {

// Reflection x_axis -> -x_axis on a real field.
Vec reflect_real(const Grid& g, const Vec& f, int axis) {
  Vec out(f.size());
  const int N = g.points_per_axis();
  for (std::size_t i = 0; i < f.size(); ++i) {
    Index idx = g.unravel(i);
    idx[axis] = (N - idx[axis]) % N;
    out[g.ravel(idx)] = f[i];
  }
  return out;
}

Vec shift_real(const Grid& g, const Vec& f, const Index& offset) {
  return to_real(lattice_shift(to_complex(g, f), offset));
}

struct Sector {
  std::string name;
  std::vector<int> odd_axes;
};

std::vector<Sector> sectors_for(int n) {
  std::vector<Sector> s{{"even", {}}};
  std::vector<int> axes;
  for (int d = 0; d < n; ++d) {
    axes.push_back(d);
    std::string name = "odd";
    for (int a : axes) name += "_x" + std::to_string(a + 1);
    s.push_back({name, axes});
  }
  return s;
}

// Projection onto fields odd in every listed axis.
Vec project(const Grid& g, Vec w, const std::vector<int>& odd_axes) {
  for (int axis : odd_axes) {
    const Vec r = reflect_real(g, w, axis);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 * (w[i] - r[i]);
  }
  return w;
}

double cosine(const Vec& a, const Vec& b) {
  const double na = norm2(a), nb = norm2(b);
  return na > 0.0 && nb > 0.0 ? std::abs(dot(a, b)) / (na * nb) : 0.0;
}

// v = t |w|^{p-2} w with t placing v at the maximum of J along its ray.
Vec ray_maximum(const DualProblem& pr, const Vec& w) {
  const double p = pr.p(), pp = pr.p_conjugate();
  Vec v(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) v[i] = std::pow(std::abs(w[i]), p - 2.0) * w[i];
  const double B = pr.integral(v, pr.apply_Kp(v));
  if (!(B > 0.0)) return Vec(w.size(), 0.0);
  const double A = std::pow(pr.norm(v, pp), pp);
  const double t = std::pow(A / B, 1.0 / (2.0 - pp));
  for (auto& e : v) e *= t;
  return v;
}

double quotient(const DualProblem& pr, const Vec& v) {
  const double n = pr.norm(v, pr.p_conjugate());
  return n > 0.0 ? pr.integral(v, pr.apply_Kp(v)) / (n * n) : 0.0;
}

}  // namespace

Index recenter_offset(const Grid& grid, const Vec& w, int cell_points) {
  const int n = grid.dim(), N = grid.points_per_axis();
  Index off{};
  for (int d = 0; d < n; ++d) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const int j = grid.unravel(i)[d];
      acc += w[i] * w[i] * std::polar(1.0, 2.0 * std::numbers::pi * j / N);
    }
    if (std::abs(acc) == 0.0) continue;
    double jbar = std::arg(acc) * N / (2.0 * std::numbers::pi) - 0.5 * N;
    jbar = std::remainder(jbar, static_cast<double>(N));
    off[d] = -static_cast<int>(std::lround(jbar / cell_points)) * cell_points;
  }
  return off;
}

NewtonResult newton_polish(const DualProblem& pr, Vec u, const MountainPassConfig& cfg) {
  const double p = pr.p();
  const Vec& Q = pr.weight().samples();
  const std::size_t n = u.size();
  auto residual = [&](const Vec& x, Vec& F) {
    Vec nl(n);
    for (std::size_t i = 0; i < n; ++i) nl[i] = Q[i] * std::pow(std::abs(x[i]), p - 2.0) * x[i];
    const Vec c = pr.convolve(nl);
    F.resize(n);
    for (std::size_t i = 0; i < n; ++i) F[i] = x[i] - c[i];
    const double un = norm2(x);
    return un > 0.0 ? norm2(F) / un : kInf;
  };
  NewtonResult res;
  Vec F;
  double r = residual(u, F);
  for (int it = 0; it < cfg.newton_max_iter && r > cfg.newton_tol; ++it) {
    Vec D(n);
    for (std::size_t i = 0; i < n; ++i) D[i] = Q[i] * (p - 1.0) * std::pow(std::abs(u[i]), p - 2.0);
    LinearMap jac = [&](const Vec& d, Vec& y) {
      Vec dd(n);
      for (std::size_t i = 0; i < n; ++i) dd[i] = D[i] * d[i];
      const Vec c = pr.convolve(dd);
      y.resize(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = d[i] - c[i];
    };
    Vec rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -F[i];
    const GmresResult g = gmres(jac, rhs, Vec(n, 0.0), cfg.gmres_restart, cfg.gmres_max_restarts, cfg.gmres_rtol);
    // Backtracking on the residual norm.
    double step = 1.0;
    Vec trial(n), Ft;
    double rt = kInf;
    for (int k = 0; k < 12; ++k, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * g.x[i];
      rt = residual(trial, Ft);
      if (rt < r) break;
    }
    res.iterations = it + 1;
    if (!(rt < r)) break;
    u.swap(trial);
    F.swap(Ft);
    r = rt;
  }
  res.u = std::move(u);
  res.residual = r;
  res.converged = r <= cfg.newton_tol;
  return res;
}

int MountainPassResult::accepted_pairs() const {
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(), [](const CriticalPair& c) { return c.accepted; }));
}

std::string MountainPassResult::to_json() const {
  using nlohmann::json;
  json j;
  const auto& c = certificate;
  j["certificate"] = {{"operator_norm", c.operator_norm}, {"rho", c.rho},
                      {"delta", c.delta}, {"sphere_min_J", c.sphere_min_J},
                      {"sphere_samples", c.sphere_samples}, {"endpoint_J", c.endpoint_J},
                      {"endpoint_norm", c.endpoint_norm}, {"path_max_J", c.path_max_J},
                      {"sphere_ok", c.sphere_ok}, {"endpoint_ok", c.endpoint_ok}};
  json pairs_json = json::array();
  for (const auto& p : pairs) {
    pairs_json.push_back({{"sector", p.sector},
                          {"J", p.state.J},
                          {"J_minus", p.J_minus},
                          {"relative_gradient", p.state.relative_gradient},
                          {"relative_gradient_minus", p.relative_gradient_minus},
                          {"duality_residual", p.solution.duality_residual},
                          {"strong_residual", p.solution.strong_residual},
                          {"strong_residual_band", p.solution.strong_residual_band},
                          {"u_sup", p.solution.sup_norm},
                          {"lbfgs_iterations", p.lbfgs_iterations},
                          {"lbfgs_relative_gradient", p.lbfgs_relative_gradient},
                          {"newton_iterations", p.newton_iterations},
                          {"newton_residual", p.newton_residual},
                          {"max_overlap", p.max_overlap},
                          {"accepted", p.accepted},
                          {"note", p.note}});
  }
  j["pairs"] = pairs_json;
  json trace = json::array();
  for (const auto& r : ps_trace)
    trace.push_back({{"pair", r.pair}, {"iteration", r.iteration}, {"J", r.J},
                     {"gradient_norm", r.gradient_norm}, {"norm_pp", r.norm_pp},
                     {"bound", r.bound}, {"holds", r.holds}});
  j["ps_trace"] = trace;
  return j.dump(2);
}

MountainPassResult mountain_pass_solve(const DualProblem& pr, const MountainPassConfig& cfg) {
  if (cfg.pairs < 1) throw ConfigError("mountain pass needs pairs >= 1");
  if (!(cfg.tol > 0.0)) throw ConfigError("mountain pass tol must be positive");
  const Grid& g = pr.grid();
  const int n = g.dim();
  const std::size_t sz = g.size();
  const double p = pr.p(), pp = pr.p_conjugate();
  const Vec& Q = pr.weight().samples();
  Vec mask(sz);
  for (std::size_t i = 0; i < sz; ++i) mask[i] = Q[i] > 0.0 ? 1.0 : 0.0;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  MountainPassResult out;

  // Envelope of the default starts: the weight itself, localized to one cell
  // when the weight is periodic.
  Vec envelope(sz);
  const double cell = g.box_length() * pr.weight().cell_points() / g.points_per_axis();
  for (std::size_t i = 0; i < sz; ++i) {
    envelope[i] = std::sqrt(Q[i]);
    if (pr.weight().periodic()) {
      const Point x = g.position(i);
      double r2 = 0.0;
      for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
      envelope[i] *= std::exp(-r2 / (0.5 * cell * cell));
    }
  }

  const auto sectors = sectors_for(n);
  std::vector<Vec> found;
  double sup_J = -kInf;
  int geometry_failures = 0;
  const int max_attempts = cfg.pairs + static_cast<int>(sectors.size());
  for (int attempt = 0; attempt < max_attempts && out.accepted_pairs() < cfg.pairs; ++attempt) {
    const bool use_sector = attempt < static_cast<int>(sectors.size());
    Sector sector = use_sector ? sectors[attempt] : Sector{"orthogonal_restart", {}};

    Vec w0(sz);
    if (attempt == 0 && cfg.initial) {
      if (cfg.initial->size() != sz) throw UsageError("mountain pass: initial guess size differs from the grid");
      w0 = *cfg.initial;
    } else {
      for (std::size_t i = 0; i < sz; ++i) {
        const Point x = g.position(i);
        double shape = envelope[i];
        for (int a : sector.odd_axes) shape *= x[a];
        w0[i] = shape * (1.0 + cfg.init_noise * normal(rng));
      }
    }
    if (!use_sector) {
      // Random start orthogonal to the span of the critical points found so far.
      for (std::size_t i = 0; i < sz; ++i) w0[i] = envelope[i] * normal(rng);
      for (std::size_t k = 0; k < found.size(); ++k) {
        const Vec& f = found[k];
        const double c = dot(w0, f) / dot(f, f);
        for (std::size_t i = 0; i < sz; ++i) w0[i] -= c * f[i];
      }
    }
    if (pr.weight().periodic() && cfg.recenter) {
      const Index off = recenter_offset(g, w0, pr.weight().cell_points());
      if (attempt == 0) out.recenter_shift = off;
      w0 = shift_real(g, w0, off);
    }
    for (std::size_t i = 0; i < sz; ++i) w0[i] *= mask[i];
    w0 = project(g, std::move(w0), sector.odd_axes);

    // G(w) = (2/p') log int |w|^p - log <v, K_p v>, v = |w|^{p-2} w, is
    // 0-homogeneous; its minimizers are ray maxima of J at the lowest level.
    const double dV = g.cell_volume();
    Objective G = [&](const Vec& x, Vec& grad) {
      const Vec w = project(g, [&] {
        Vec m(x);
        for (std::size_t i = 0; i < sz; ++i) m[i] *= mask[i];
        return m;
      }(), sector.odd_axes);
      Vec v(sz), a(sz);
      double Aw = 0.0;
      for (std::size_t i = 0; i < sz; ++i) {
        a[i] = std::pow(std::abs(w[i]), p - 2.0);
        v[i] = a[i] * w[i];
        Aw += a[i] * w[i] * w[i];
      }
      Aw *= dV;
      const Vec Kv = pr.apply_Kp(v);
      const double B = pr.integral(v, Kv);
      grad.assign(sz, 0.0);
      if (!(B > 0.0) || !(Aw > 0.0)) return kInf;
      Vec gw(sz);
      for (std::size_t i = 0; i < sz; ++i)
        gw[i] = dV * ((2.0 * p / pp) * v[i] / Aw - 2.0 * (p - 1.0) * a[i] * Kv[i] / B);
      gw = project(g, std::move(gw), sector.odd_axes);
      for (std::size_t i = 0; i < sz; ++i) grad[i] = gw[i] * mask[i];
      return (2.0 / pp) * std::log(Aw) - std::log(B);
    };
    {
      Vec probe;
      if (!std::isfinite(G(w0, probe))) {
        CriticalPair skipped;
        skipped.sector = sector.name;
        skipped.note = "initial direction has <v, K_p v> <= 0; no endpoint with J < 0 on its ray";
        out.pairs.push_back(std::move(skipped));
        ++geometry_failures;
        continue;
      }
    }

    const int pair_index = static_cast<int>(out.pairs.size());
    LbfgsCallback cb = [&](int it, const Vec& x, double, const Vec&) {
      if (cfg.ps_stride <= 0 || it % cfg.ps_stride != 0) return;
      Vec w(x);
      for (std::size_t i = 0; i < sz; ++i) w[i] *= mask[i];
      w = project(g, std::move(w), sector.odd_axes);
      const Vec v = ray_maximum(pr, w);
      PsRecord r;
      r.pair = pair_index;
      r.iteration = it;
      r.J = pr.eval_J(v);
      const Vec gr = pr.grad_J(v);
      r.gradient_norm = std::sqrt(pr.integral(gr, gr));
      r.norm_pp = std::pow(pr.norm(v, pp), pp);
      sup_J = std::max(sup_J, r.J);
      r.bound = (sup_J + r.gradient_norm * std::sqrt(pr.integral(v, v))) / (1.0 / pp - 0.5);
      r.holds = r.norm_pp <= r.bound * (1.0 + 1e-10);
      out.ps_trace.push_back(r);
    };
    LbfgsOptions lo;
    lo.max_iter = cfg.lbfgs_max_iter;
    const LbfgsResult lr = lbfgs(G, w0, lo, cb);

    Vec w(lr.x);
    for (std::size_t i = 0; i < sz; ++i) w[i] *= mask[i];
    w = project(g, std::move(w), sector.odd_axes);
    Vec v = ray_maximum(pr, w);

    CriticalPair cp;
    cp.sector = sector.name;
    cp.lbfgs_iterations = lr.iterations;
    cp.lbfgs_relative_gradient = pr.relative_gradient(v);

    // Newton polish on u = Psi(Q^{1/p} v).
    Vec qv(sz);
    for (std::size_t i = 0; i < sz; ++i) qv[i] = pr.q_root_p()[i] * v[i];
    NewtonResult nr = newton_polish(pr, pr.convolve(qv), cfg);
    cp.newton_iterations = nr.iterations;
    cp.newton_residual = nr.residual;
    for (std::size_t i = 0; i < sz; ++i)
      v[i] = pr.q_root_pp()[i] * std::pow(std::abs(nr.u[i]), p - 2.0) * nr.u[i];

    cp.state = DualState::evaluate(pr, v);
    Vec neg(v);
    for (auto& e : neg) e = -e;
    cp.J_minus = pr.eval_J(neg);
    cp.relative_gradient_minus = pr.relative_gradient(neg);
    for (const auto& f : found) cp.max_overlap = std::max(cp.max_overlap, cosine(f, v));
    try {
      cp.solution = recover_u(pr, v, 10.0 * cfg.tol);
    } catch (const InconsistencyError& e) {
      cp.solution = solution_residuals(pr, nr.u, v);
      cp.note = e.what();
    }
    std::ostringstream why;
    if (!(cp.state.relative_gradient <= cfg.tol)) why << "relative gradient above tol; ";
    if (!(cp.state.J > 0.0)) why << "J <= 0; ";
    if (cp.max_overlap > cfg.distinct_overlap) why << "duplicate of an earlier pair; ";
    if (!cp.note.empty()) why << cp.note << "; ";
    cp.accepted = why.str().empty();
    if (!cp.accepted) cp.note = why.str();
    if (cp.accepted) found.push_back(v);
    out.pairs.push_back(std::move(cp));
  }

  if (found.empty()) {
    if (geometry_failures == static_cast<int>(out.pairs.size()))
      throw GeometryError("no start direction with <v, K_p v> > 0; mountain-pass geometry not found");
    throw ConvergenceError("mountain pass: no critical point met the tolerances", out.to_json());
  }

  // Geometry certificate.
  GeometryCertificate& cert = out.certificate;
  std::vector<Vec> samples;
  for (int k = 0; k < cfg.sphere_samples; ++k) {
    Vec z(sz);
    for (std::size_t i = 0; i < sz; ++i) z[i] = envelope[i] * normal(rng);
    samples.push_back(std::move(z));
  }
  for (const auto& f : found) samples.push_back(f);
  double C = 0.0;
  for (const auto& z : samples) C = std::max(C, quotient(pr, z));
  cert.operator_norm = C;
  cert.rho = cfg.rho_fraction * std::pow(C, -1.0 / (2.0 - pp));
  cert.delta = std::pow(cert.rho, pp) / pp - 0.5 * C * cert.rho * cert.rho;
  cert.sphere_min_J = kInf;
  for (auto z : samples) {
    const double scale = cert.rho / pr.norm(z, pp);
    for (auto& e : z) e *= scale;
    cert.sphere_min_J = std::min(cert.sphere_min_J, pr.eval_J(z));
  }
  cert.sphere_samples = static_cast<int>(samples.size());
  cert.sphere_ok = cert.delta > 0.0 && cert.sphere_min_J >= cert.delta * (1.0 - 1e-12);

  // Endpoint on the ray of the first critical point: J(t v*) = 0 at t0 = (2/p')^{1/(2-p')}.
  const Vec& v1 = found.front();
  const double T = 2.0 * std::pow(2.0 / pp, 1.0 / (2.0 - pp));
  Vec v0(v1);
  for (auto& e : v0) e *= T;
  cert.endpoint_J = pr.eval_J(v0);
  cert.endpoint_norm = pr.norm(v0, pp);
  cert.endpoint_ok = cert.endpoint_J < 0.0 && cert.endpoint_norm > cert.rho;
  cert.path_max_J = -kInf;
  for (int k = 0; k <= 64; ++k) {
    Vec z(v1);
    const double t = T * k / 64.0;
    for (auto& e : z) e *= t;
    cert.path_max_J = std::max(cert.path_max_J, pr.eval_J(z));
  }
  if (!cert.endpoint_ok) throw GeometryError("no endpoint with J < 0 outside the sphere of radius rho");
  return out;
}

RefinementCheck refine_solution(const DualProblem& coarse, const Vec& u, const DualProblem& fine,
                                const MountainPassConfig& cfg) {
  if (fine.grid().box_length() != coarse.grid().box_length())
    throw UsageError("refine_solution: grids must share the box length");
  RefinementCheck rc;
  for (double e : u) rc.coarse_sup = std::max(rc.coarse_sup, std::abs(e));
  const Vec u0 = to_real(prolong(to_complex(coarse.grid(), u), fine.grid()), 1e-8);
  const NewtonResult nr = newton_polish(fine, u0, cfg);
  rc.newton_iterations = nr.iterations;
  rc.converged = nr.converged;
  for (double e : nr.u) rc.fine_sup = std::max(rc.fine_sup, std::abs(e));
  rc.relative_change = rc.coarse_sup > 0.0 ? std::abs(rc.fine_sup - rc.coarse_sup) / rc.coarse_sup : 0.0;
  Vec v(nr.u.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = fine.q_root_pp()[i] * std::pow(std::abs(nr.u[i]), fine.p() - 2.0) * nr.u[i];
  rc.fine_relative_gradient = fine.relative_gradient(v);
  return rc;
}

}  // namespace fhelm
