#pragma once

#include <vector>

#include "fhelm/grid.hpp"

namespace fhelm {

struct ResolventParams {
  int n = 3;
  double s = 1.0;
  double lambda = 1.0;
  double epsilon = 0.1;
  // Lifts the n/(n+1) <= s < n/2 window for negative-regime demonstrations.
  bool allow_outside_window = false;

  // Radius of the characteristic sphere |xi|^{2s} = lambda.
  double k() const;
  void validate() const;
};

// Radial cutoff phi: 1 on [0, inner], 0 on [outer, inf), degree-7 smoothstep between.
struct CutoffSpec {
  double inner = 5.0 / 8.0;
  double outer = 3.0 / 4.0;
  double operator()(double r) const;
};

// 0 at t <= 0, 1 at t >= 1, with three vanishing derivatives at both ends.
double smoothstep7(double t);

// Smallest absorption the grid resolves near the characteristic sphere.
double eps_floor(const ResolventParams& params, const Grid& grid);

// 1 / (|xi|^{2s} - lambda - i eps) at every lattice frequency.
ComplexField build_multiplier(const ResolventParams& params, const Grid& grid);
ComplexField apply_resolvent(const ComplexField& f, const ResolventParams& params);
// (|xi|^{2s} - lambda - i eps) applied spectrally; the exact inverse of apply_resolvent.
ComplexField apply_forward_operator(const ComplexField& u, const ResolventParams& params);

struct SplitMultiplier {
  ComplexField m1;  // low frequencies, phi(|xi|/k) m
  ComplexField m2;  // high frequencies, (1 - phi(|xi|/2k)) m
  ComplexField m3;  // remainder around the sphere
};
SplitMultiplier split_multiplier(const ResolventParams& params, const CutoffSpec& cutoff,
                                 const Grid& grid);

// Spectral multiplication by |xi|^s.
ComplexField apply_ds(const ComplexField& f, double s);
// Spectral multiplication by |xi|^{2s}.
ComplexField apply_fractional_laplacian(const ComplexField& f, double s);

std::vector<double> geometric_eps_sequence(double eps_min, int terms, double ratio = 0.5);

struct LimitReport {
  std::vector<double> eps;
  std::vector<double> cauchy;  // ||u(eps_{j+1}) - u(eps_j)||_2 / ||u(eps_0)||_2
  double extrapolation_change = 0.0;  // last Neville correction, relative
  bool converged = true;
};

struct LimitResult {
  ComplexField u;
  LimitReport report;
};

struct LimitOptions {
  bool enforce_floor = true;
};

// Polynomial (Richardson/Neville) extrapolation of R_eps f to eps = 0.
LimitResult limiting_absorption(const ComplexField& f, const ResolventParams& base,
                                const std::vector<double>& eps_sequence,
                                const LimitOptions& opts = {});

}  // namespace fhelm
