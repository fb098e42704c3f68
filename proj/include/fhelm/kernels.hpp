#pragma once

#include <vector>

#include "fhelm/grid.hpp"
#include "fhelm/resolvent.hpp"

namespace fhelm {

// |K(x)| <= c_small |x|^{exp_small} for |x| <= crossover_radius and
// c_large |x|^{exp_large} beyond.
struct KernelEnvelope {
  double c_small = 1.0;
  double exp_small = 0.0;
  double c_large = 1.0;
  double exp_large = 0.0;
  double crossover_radius = 1.0;

  static KernelEnvelope for_params(int n, double s);
  double operator()(double r) const;
};

struct RaySample {
  int ray = 0;  // 0: axis, 1: face diagonal, 2: body diagonal
  double r = 0.0;
  cplx value;
  double envelope = 0.0;
};

struct EnvelopeLevel {
  int points_per_axis = 0;
  std::vector<RaySample> samples;
  double max_ratio_small = 0.0;  // max |K| / envelope for r <= crossover (constants removed)
  double max_ratio_large = 0.0;
};

struct EnvelopeReport {
  EnvelopeLevel coarse;
  EnvelopeLevel fine;  // empty when refinement is disabled
  bool finite = false;
  bool refinement_stable = false;
  double refinement_tolerance = 0.2;
  bool pass = false;
};

struct EnvelopeOptions {
  bool refine = true;
  double refinement_tolerance = 0.2;
  double max_radius_fraction = 0.25;  // rays stop at this fraction of L
  bool enforce_decay = true;          // require eps * L >= 4
};

// Physical kernel (2 pi)^{-n} sum m(xi) e^{i xi.x} (Delta xi)^n of a spectral multiplier.
ComplexField synthesize_kernel(const ComplexField& multiplier);
ComplexField resolvent_kernel(const ResolventParams& params, const Grid& grid);

// Lattice samples of a kernel along the axis, face-diagonal and body-diagonal rays from 0.
std::vector<RaySample> sample_rays(const ComplexField& kernel, double max_radius,
                                   const KernelEnvelope& envelope);

EnvelopeLevel measure_envelope(const ComplexField& kernel, const KernelEnvelope& envelope,
                               double max_radius);

EnvelopeReport check_kernel_envelope(const ResolventParams& params, const Grid& grid,
                                     const KernelEnvelope& envelope,
                                     const EnvelopeOptions& opts = {});

struct SplitKernelSpec {
  double psi_plateau = 1.0 / 6.0;
  double psi_support = 1.0 / 4.0;
  double operator()(double xi_over_k) const;  // the annular cutoff psi-hat
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log|K| about the line
  double r_lo = 0.0;
  double r_hi = 0.0;
  int points = 0;
};

// Least squares of log|value| against log r over samples with r in [r_lo, r_hi].
// A positive wavelength replaces each sample by the running max over one
// wavelength on its ray, so oscillating kernels fit by their envelope.
SlopeFit fit_decay(const std::vector<RaySample>& samples, double r_lo, double r_hi,
                   double wavelength = 0.0);

struct DecayRanges {
  // Radii are in units of 1/k, the natural length of the resolvent.
  double small_lo_cells = 2.0;  // lower end of the small-|x| fit, in grid spacings
  double small_hi = 0.5;
  double large_lo = 3.0;
  double large_hi_fraction = 0.25;  // of L
};

struct SplitKernelResult {
  ComplexField k1;
  ComplexField k2;
  SlopeFit k2_small;
  SlopeFit k2_large;
  SlopeFit k1_envelope;
  double plateau_max_k2_hat = 0.0;  // max |K2-hat| on the plateau annulus
  double partition_error = 0.0;     // max |K1 + K2 - K| / max |K|
};

SplitKernelResult split_kernel(const ResolventParams& params, const SplitKernelSpec& spec,
                               const Grid& grid, const DecayRanges& ranges = {});

}  // namespace fhelm
