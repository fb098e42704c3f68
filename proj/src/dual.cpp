#include "fhelm/dual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "fhelm/errors.hpp"

namespace fhelm {

WeightKind parse_weight_kind(const std::string& name) {
  if (name == "bump_compact") return WeightKind::bump_compact;
  if (name == "decaying") return WeightKind::decaying;
  if (name == "periodic_cell") return WeightKind::periodic_cell;
  if (name == "constant") return WeightKind::constant;
  throw ConfigError("unknown weight kind '" + name + "'");
}

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::bump_compact: return "bump_compact";
    case WeightKind::decaying: return "decaying";
    case WeightKind::periodic_cell: return "periodic_cell";
    case WeightKind::constant: return "constant";
  }
  return "unknown";
}

WeightQ::WeightQ(const Grid& grid, const WeightSpec& spec) : grid_(grid), spec_(spec), q_(grid.size()) {
  if (!(spec.amplitude > 0.0)) throw ConfigError("weight amplitude must be positive");
  if (spec.kind == WeightKind::bump_compact || spec.kind == WeightKind::decaying) {
    if (!(spec.radius > 0.0)) throw ConfigError("weight radius must be positive");
  }
  if (spec.kind == WeightKind::decaying && !(spec.decay > 0.0))
    throw ConfigError("decaying weight needs a positive decay exponent");
  if (spec.kind == WeightKind::periodic_cell) {
    if (spec.cells < 1) throw ConfigError("periodic weight needs cells >= 1");
    if (grid.points_per_axis() % spec.cells != 0)
      throw ConfigError("points_per_axis must be divisible by the number of periodic cells");
  }
  const int n = grid.dim();
  const double cell = grid.box_length() / std::max(spec.cells, 1);
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const Point x = grid.position(i);
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    double q = 0.0;
    switch (spec.kind) {
      case WeightKind::bump_compact: {
        const double t = r2 / (spec.radius * spec.radius);
        q = t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
        break;
      }
      case WeightKind::decaying:
        q = std::pow(1.0 + r2 / (spec.radius * spec.radius), -0.5 * spec.decay);
        break;
      case WeightKind::periodic_cell: {
        double prod = 1.0;
        for (int d = 0; d < n; ++d) prod *= std::cos(2.0 * std::numbers::pi * x[d] / cell);
        q = 1.0 + prod;
        break;
      }
      case WeightKind::constant:
        q = 1.0;
        break;
    }
    q_[i] = spec.amplitude * std::max(q, 0.0);
  }
  if (*std::max_element(q_.begin(), q_.end()) <= 0.0)
    throw ConfigError("weight Q vanishes on every grid point");
}

int WeightQ::cell_points() const {
  return periodic() ? grid_.points_per_axis() / spec_.cells : grid_.points_per_axis();
}

DualWindow dual_exponent_window(int n, double s) {
  if (n < 2) throw ConfigError("the dual method needs n >= 2");
  const double hi = 2.0 * s < n ? 2.0 * n / (n - 2.0 * s) : kInf;
  return {2.0 * (n + 1.0) / (n - 1.0), hi};
}

DualProblem::DualProblem(const WeightQ& weight, const ResolventParams& params, double p,
                         bool check_window)
    : weight_(weight), params_(params), p_(p), pp_(p / (p - 1.0)) {
  const Grid& g = weight.grid();
  if (g.dim() != params.n) throw UsageError("DualProblem: weight grid differs from params.n");
  if (check_window) {
    const DualWindow w = dual_exponent_window(params.n, params.s);
    if (!(p > w.lo && p < w.hi)) {
      std::ostringstream os;
      os << "2(n+1)/(n-1) < p < 2n/(n-2s) violated: p = " << p << " outside (" << w.lo << ", "
         << w.hi << ")";
      throw ConfigError(os.str());
    }
  } else if (!(p > 2.0)) {
    throw ConfigError("dual method needs p > 2");
  }
  ResolventParams probe = params_;
  if (!(probe.epsilon > 0.0)) probe.epsilon = 1.0;
  probe.validate();
  if (!(g.nyquist() > probe.k())) throw ConfigError("characteristic sphere outside the resolved band");
  if (!(params_.epsilon > 0.0)) params_.epsilon = eps_floor(probe, g);

  const double eps = params_.epsilon;
  const std::vector<double> xi = g.frequency_norm();
  re_m_.resize(g.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double a = std::pow(xi[i], 2.0 * params_.s) - params_.lambda;
    const double m1 = a / (a * a + eps * eps);
    const double m2 = a / (a * a + 4.0 * eps * eps);
    re_m_[i] = (4.0 * m1 - m2) / 3.0;
  }
  const Vec& q = weight.samples();
  qp_.resize(q.size());
  qpp_.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    qp_[i] = std::pow(q[i], 1.0 / p_);
    qpp_[i] = std::pow(q[i], 1.0 / pp_);
  }
}

Vec DualProblem::convolve(const Vec& g) const {
  const Grid& gr = grid();
  if (g.size() != gr.size()) throw UsageError("convolve: field size differs from the grid");
  std::vector<cplx> buf(g.begin(), g.end());
  detail::fft_inplace(gr, buf.data(), -1);
  const double scale = 1.0 / static_cast<double>(gr.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= re_m_[i] * scale;
  detail::fft_inplace(gr, buf.data(), +1);
  Vec out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return out;
}

Vec DualProblem::apply_Kp(const Vec& v) const {
  Vec w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = qp_[i] * v[i];
  Vec c = convolve(w);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= qp_[i];
  return c;
}

double DualProblem::integral(const Vec& a, const Vec& b) const {
  return dot(a, b) * grid().cell_volume();
}

double DualProblem::norm(const Vec& a, double r) const {
  double s = 0.0;
  for (double e : a) s += std::pow(std::abs(e), r);
  return std::pow(s * grid().cell_volume(), 1.0 / r);
}

double DualProblem::eval_J(const Vec& v) const {
  double s = 0.0;
  for (double e : v) s += std::pow(std::abs(e), pp_);
  return s * grid().cell_volume() / pp_ - 0.5 * integral(v, apply_Kp(v));
}

Vec DualProblem::duality_map(const Vec& v) const {
  Vec d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    d[i] = v[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v[i]), pp_ - 1.0), v[i]);
  return d;
}

Vec DualProblem::grad_J(const Vec& v) const {
  Vec d = duality_map(v);
  const Vec k = apply_Kp(v);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= k[i];
  return d;
}

double DualProblem::relative_gradient(const Vec& v) const {
  const double den = norm2(duality_map(v));
  return den > 0.0 ? norm2(grad_J(v)) / den : 0.0;
}

DualState DualState::evaluate(const DualProblem& problem, Vec v) {
  DualState st;
  st.p = problem.p();
  st.p_conjugate = problem.p_conjugate();
  st.J = problem.eval_J(v);
  const Vec g = problem.grad_J(v);
  st.gradient_norm = std::sqrt(problem.integral(g, g));
  st.relative_gradient = problem.relative_gradient(v);
  st.v = std::move(v);
  return st;
}

ComplexField DualState::field(const Grid& grid) const { return to_complex(grid, v); }

RecoveredSolution solution_residuals(const DualProblem& problem, const Vec& u, const Vec& v) {
  const Grid& g = problem.grid();
  const double p = problem.p();
  const Vec& Q = problem.weight().samples();
  RecoveredSolution out;
  out.u = u;
  for (double e : u) out.sup_norm = std::max(out.sup_norm, std::abs(e));

  Vec vd(u.size()), nl(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double pw = std::pow(std::abs(u[i]), p - 2.0) * u[i];
    vd[i] = problem.q_root_pp()[i] * pw;
    nl[i] = Q[i] * pw;
  }
  Vec diff(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) diff[i] = v[i] - vd[i];
  const double vn = problem.norm(v, problem.p_conjugate());
  out.duality_residual = vn > 0.0 ? problem.norm(diff, problem.p_conjugate()) / vn : 0.0;

  // Strong form in Fourier space: a(xi) u_hat - N_hat.
  std::vector<cplx> U(u.begin(), u.end()), F(nl.begin(), nl.end());
  detail::fft_inplace(g, U.data(), -1);
  detail::fft_inplace(g, F.data(), -1);
  const std::vector<double> xi = g.frequency_norm();
  const double eps = problem.epsilon();
  double r_all = 0.0, f_all = 0.0, r_band = 0.0, f_band = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double a = std::pow(xi[i], 2.0 * problem.params().s) - problem.params().lambda;
    const double r = std::norm(a * U[i] - F[i]);
    const double f = std::norm(F[i]);
    r_all += r;
    f_all += f;
    if (std::abs(a) >= out.band_factor * eps) {
      r_band += r;
      f_band += f;
    }
  }
  out.strong_residual = f_all > 0.0 ? std::sqrt(r_all / f_all) : 0.0;
  out.strong_residual_band = f_band > 0.0 ? std::sqrt(r_band / f_band) : 0.0;
  return out;
}

RecoveredSolution recover_u(const DualProblem& problem, const Vec& v, double duality_tol) {
  Vec w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = problem.q_root_p()[i] * v[i];
  RecoveredSolution out = solution_residuals(problem, problem.convolve(w), v);
  if (out.duality_residual > duality_tol) {
    std::ostringstream os;
    os << "duality residual " << out.duality_residual << " exceeds " << duality_tol
       << " (spurious critical point)";
    throw InconsistencyError(os.str());
  }
  return out;
}

Vec to_real(const ComplexField& f, double tol) {
  require_space(f, Space::physical, "to_real");
  double m = 0.0, im = 0.0;
  for (const auto& c : f.values()) {
    m = std::max(m, std::abs(c));
    im = std::max(im, std::abs(c.imag()));
  }
  if (im > tol * std::max(m, 1e-300) && im > 0.0)
    throw UsageError("field is not real-valued");
  Vec out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i].real();
  return out;
}

ComplexField to_complex(const Grid& grid, const Vec& v) {
  if (v.size() != grid.size()) throw UsageError("to_complex: size differs from the grid");
  return ComplexField(grid, std::vector<cplx>(v.begin(), v.end()), Space::physical);
}

}  // namespace fhelm
