#pragma once

#include <string>
#include <vector>

#include "fhelm/grid.hpp"
#include "fhelm/linalg.hpp"
#include "fhelm/resolvent.hpp"

namespace fhelm {

enum class WeightKind { bump_compact, decaying, periodic_cell, constant };

WeightKind parse_weight_kind(const std::string& name);
std::string to_string(WeightKind kind);

struct WeightSpec {
  WeightKind kind = WeightKind::bump_compact;
  double amplitude = 1.0;
  double radius = 3.0;  // support radius of the bump, length scale of the decaying weight
  double decay = 4.0;   // exponent alpha of amplitude * (1 + |x|^2 / radius^2)^{-alpha/2}
  int cells = 4;        // periods per axis of the periodic weight
};

/// Nonnegative weight Q sampled on a grid.
///
/// bump_compact: amplitude * exp(1 - 1/(1 - (r/radius)^2)) inside the ball, 0 outside.
/// periodic_cell: amplitude * (1 + prod_i cos(2 pi x_i / c)) with c = L / cells.
class WeightQ {
 public:
  WeightQ(const Grid& grid, const WeightSpec& spec);

  const Grid& grid() const { return grid_; }
  const WeightSpec& spec() const { return spec_; }
  const Vec& samples() const { return q_; }
  bool periodic() const { return spec_.kind == WeightKind::periodic_cell; }
  // Period of the periodic weight in lattice points per axis.
  int cell_points() const;

 private:
  Grid grid_;
  WeightSpec spec_;
  Vec q_;
};

// Open interval (2(n+1)/(n-1), 2n/(n-2s)) of exponents p for the dual method.
struct DualWindow {
  double lo;
  double hi;
};
DualWindow dual_exponent_window(int n, double s);

/// K_p, J and grad J for a fixed weight, exponent and absorption.
///
/// Psi = Re K is applied as the multiplier (4 Re m(eps) - Re m(2 eps)) / 3, one
/// Richardson step towards eps = 0. Fields are real vectors in grid order.
class DualProblem {
 public:
  // params.epsilon <= 0 selects eps_floor for the grid.
  DualProblem(const WeightQ& weight, const ResolventParams& params, double p,
              bool check_window = true);

  const Grid& grid() const { return weight_.grid(); }
  const WeightQ& weight() const { return weight_; }
  const ResolventParams& params() const { return params_; }
  double p() const { return p_; }
  double p_conjugate() const { return pp_; }
  double epsilon() const { return params_.epsilon; }
  const Vec& real_multiplier() const { return re_m_; }

  // Psi * g for real g.
  Vec convolve(const Vec& g) const;
  Vec apply_Kp(const Vec& v) const;
  double eval_J(const Vec& v) const;
  Vec grad_J(const Vec& v) const;
  // |v|^{p'-2} v, zero where v = 0.
  Vec duality_map(const Vec& v) const;
  // ||grad J(v)||_2 / ||duality_map(v)||_2.
  double relative_gradient(const Vec& v) const;

  // sum a b h^n and (sum |a|^r h^n)^{1/r}.
  double integral(const Vec& a, const Vec& b) const;
  double norm(const Vec& a, double r) const;

  const Vec& q_root_p() const { return qp_; }
  const Vec& q_root_pp() const { return qpp_; }

 private:
  WeightQ weight_;
  ResolventParams params_;
  double p_;
  double pp_;
  Vec re_m_;
  Vec qp_;   // Q^{1/p}
  Vec qpp_;  // Q^{1/p'}
};

struct DualState {
  Vec v;
  double p = 0.0;
  double p_conjugate = 0.0;
  double J = 0.0;
  double gradient_norm = 0.0;       // ||grad J||_2
  double relative_gradient = 0.0;

  static DualState evaluate(const DualProblem& problem, Vec v);
  ComplexField field(const Grid& grid) const;
};

struct RecoveredSolution {
  Vec u;
  double duality_residual = 0.0;      // ||v - Q^{1/p'}|u|^{p-2}u||_{p'} / ||v||_{p'}
  double strong_residual = 0.0;       // ||((-Delta)^s - lambda) u - Q|u|^{p-2}u||_2 / ||Q|u|^{p-2}u||_2
  double strong_residual_band = 0.0;  // same, on frequencies with ||xi|^{2s} - lambda| >= band_factor * eps
  double band_factor = 10.0;
  double sup_norm = 0.0;
};

// u = Psi (Q^{1/p} v). Throws InconsistencyError when the duality residual
// exceeds duality_tol.
RecoveredSolution recover_u(const DualProblem& problem, const Vec& v, double duality_tol);

// Residuals of a given u without the duality check.
RecoveredSolution solution_residuals(const DualProblem& problem, const Vec& u, const Vec& v);

// Field conversions; to_real rejects imaginary parts above tol * max |f|.
Vec to_real(const ComplexField& f, double tol = 1e-12);
ComplexField to_complex(const Grid& grid, const Vec& v);

}  // namespace fhelm
