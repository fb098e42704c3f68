#pragma once

#include <functional>
#include <vector>

#include "fhelm/exponents.hpp"
#include "fhelm/families.hpp"
#include "fhelm/grid.hpp"
#include "fhelm/resolvent.hpp"

namespace fhelm {

struct SweepParams {
  int n = 3;
  double s = 1.0;
  std::vector<double> lambdas{1.0};
  std::vector<double> epsilons{0.1};
  bool eps_relative = false;  // epsilon_used = epsilon * lambda
  bool negative_regime = false;  // admit s < n/(n+1) and inadmissible (p, q)
  bool enforce_decay = true;     // require eps * L >= 4
  double eps_tolerance = 0.2;
  double slope_tolerance = 0.1;
};

struct SweepCell {
  double lambda = 0.0;
  double epsilon = 0.0;
  double max_ratio = 0.0;
  int argmax = -1;  // family member attaining the max
  std::vector<double> ratios;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

// Least squares of log y against log x; zero y values are skipped.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct EstimateReport {
  std::vector<SweepCell> cells;
  std::vector<double> eps_variation;  // per lambda: (max - min) / min over the epsilon list
  std::vector<double> eps_growth;     // per lambda: ratio at smallest eps / ratio at largest eps
  double max_eps_variation = 0.0;
  LineFit lambda_fit;        // fit of max ratio (smallest eps) against lambda
  double predicted_slope = 0.0;
  double empirical_constant = 0.0;  // max ratio * lambda^{-predicted}
  bool eps_stable = true;
  bool slope_ok = true;
  bool pass = false;
};

// Produces the test fields for a characteristic wavenumber k.
using FieldSource = std::function<std::vector<ComplexField>(const Grid&, double k)>;
FieldSource family_source(const std::vector<TestFamily>& families);

// max ||R f||_q / ||f||_p over the families at every (lambda, eps).
EstimateReport opnorm_sweep(const std::vector<TestFamily>& families, const ExponentTriple& triple,
                            const SweepParams& sweep, const Grid& grid);
EstimateReport opnorm_sweep(const FieldSource& source, const ExponentTriple& triple,
                            const SweepParams& sweep, const Grid& grid);

// max over centers of (R^{-1} sum_{|x - c| <= R} |u|^2 h^n)^{1/2}, minimum-image distance.
double local_l2(const ComplexField& u, double R, const std::vector<Point>& centers);

struct LocalL2Report {
  std::vector<double> lambdas;
  std::vector<double> sup_u;   // sup over R, centers and family of local_l2(u) / ||f||_p
  std::vector<double> sup_ds;  // same for D^s u
  LineFit fit_u;
  LineFit fit_ds;
  double predicted_u = 0.0;
  double predicted_ds = 0.0;
  double tolerance = 0.15;
  bool pass = false;
};

// Predicted lambda exponents of the local L^2 quantities for u = R f and D^s u.
double local_l2_exponent(int n, double s, double p, bool with_ds);

// Radii are r_units / k so that the sup domain R >= 1/sqrt(lambda) scales with lambda.
LocalL2Report local_l2_sweep(const std::vector<TestFamily>& families, double p,
                             const SweepParams& sweep, const Grid& grid,
                             const std::vector<double>& r_units, double tolerance = 0.15);

struct WeightedReport {
  double alpha = 0.0;
  double tau = 0.0;
  double kappa_coarse = 0.0;
  double kappa_fine = 0.0;
  bool finite = false;
  bool refinement_stable = false;
  double tolerance = 0.25;
  bool pass = false;
};

// max weighted_sup_norm(R f, tau(alpha)) / weighted_sup_norm(f, alpha) over the families,
// on the grid and on the grid with twice the points per axis.
WeightedReport weighted_estimate_check(const std::vector<TestFamily>& families, double alpha,
                                       const ResolventParams& params, const Grid& grid,
                                       bool continuous_tau = false, double tolerance = 0.25);

enum class RadiationMode { vector, scalar };

struct RadiationRow {
  double R = 0.0;
  double residual = 0.0;
  double residual_over_R = 0.0;
};

struct RadiationReport {
  std::vector<RadiationRow> rows;
  bool density_decreasing = false;  // residual/R strictly decreasing in R
  bool residual_decreasing = false;
};

// Vector mode: sum over |x| <= R of |G^s u - i k^s (x/|x|) u|^2 h^n with
// G^s the multiplier i xi |xi|^{s-1}. Scalar mode: |D^s u - i k^s u|^2.
// k_override > 0 replaces lambda^{1/(2s)}.
// (1 - exp(-r^2)) exp(+-i k r) / r, tapered to zero between taper_inner and taper_outer.
ComplexField spherical_wave(const Grid& grid, double k, bool outgoing, double taper_inner,
                            double taper_outer);

RadiationReport radiation_residual(const ComplexField& u, const ResolventParams& params,
                                   const std::vector<double>& R_list,
                                   RadiationMode mode = RadiationMode::vector,
                                   double k_override = 0.0);

}  // namespace fhelm
