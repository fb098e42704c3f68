#include "fhelm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fhelm/errors.hpp"

namespace fhelm {

KernelEnvelope KernelEnvelope::for_params(int n, double s) {
  KernelEnvelope e;
  e.exp_small = 2.0 * s - n;
  e.exp_large = 0.5 * (1.0 - n);
  return e;
}

double KernelEnvelope::operator()(double r) const {
  return r <= crossover_radius ? c_small * std::pow(r, exp_small)
                               : c_large * std::pow(r, exp_large);
}

ComplexField synthesize_kernel(const ComplexField& multiplier) {
  require_space(multiplier, Space::spectral, "synthesize_kernel");
  const Grid& g = multiplier.grid();
  ComplexField k = from_spectrum(multiplier);
  const double scale = std::pow(static_cast<double>(g.points_per_axis()), 0.5 * g.dim()) /
                       std::pow(g.box_length(), g.dim());
  k *= scale;
  return k;
}

ComplexField resolvent_kernel(const ResolventParams& params, const Grid& grid) {
  return synthesize_kernel(build_multiplier(params, grid));
}

std::vector<RaySample> sample_rays(const ComplexField& kernel, double max_radius,
                                   const KernelEnvelope& envelope) {
  require_space(kernel, Space::physical, "sample_rays");
  const Grid& g = kernel.grid();
  const int N = g.points_per_axis();
  const int rays = std::min(3, g.dim());
  std::vector<RaySample> out;
  for (int ray = 0; ray < rays; ++ray) {
    const int active = ray + 1;
    const double step = g.spacing() * std::sqrt(static_cast<double>(active));
    for (int j = 1; j < N / 2; ++j) {
      const double r = j * step;
      if (r > max_radius) break;
      Index idx{};
      for (int a = 0; a < g.dim(); ++a) idx[a] = N / 2 + (a < active ? j : 0);
      out.push_back({ray, r, kernel[g.ravel(idx)], envelope(r)});
    }
  }
  return out;
}

EnvelopeLevel measure_envelope(const ComplexField& kernel, const KernelEnvelope& envelope,
                               double max_radius) {
  EnvelopeLevel level;
  level.points_per_axis = kernel.grid().points_per_axis();
  level.samples = sample_rays(kernel, max_radius, envelope);
  KernelEnvelope unit = envelope;
  unit.c_small = unit.c_large = 1.0;
  for (const auto& smp : level.samples) {
    const double ratio = std::abs(smp.value) / unit(smp.r);
    if (smp.r <= envelope.crossover_radius)
      level.max_ratio_small = std::max(level.max_ratio_small, ratio);
    else
      level.max_ratio_large = std::max(level.max_ratio_large, ratio);
  }
  return level;
}

namespace {

void check_exponents(const ResolventParams& params, const KernelEnvelope& envelope) {
  const KernelEnvelope expected = KernelEnvelope::for_params(params.n, params.s);
  if (std::abs(envelope.exp_small - expected.exp_small) > 1e-12 ||
      std::abs(envelope.exp_large - expected.exp_large) > 1e-12) {
    std::ostringstream os;
    os << "envelope exponents (" << envelope.exp_small << ", " << envelope.exp_large
       << ") differ from 2s - n = " << expected.exp_small
       << " and (1 - n)/2 = " << expected.exp_large;
    throw ConfigError(os.str());
  }
  if (!(envelope.c_small > 0.0) || !(envelope.c_large > 0.0) ||
      !(envelope.crossover_radius > 0.0))
    throw ConfigError("envelope constants and crossover radius must be positive");
}

void check_kernel_preconditions(const ResolventParams& params, const Grid& grid, bool decay) {
  params.validate();
  const double floor = eps_floor(params, grid);
  if (params.epsilon < floor * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "eps = " << params.epsilon << " is below eps_floor = " << floor;
    throw ConfigError(os.str());
  }
  if (decay && params.epsilon * grid.box_length() < 4.0) {
    std::ostringstream os;
    os << "eps * L >= 4 violated: eps * L = " << params.epsilon * grid.box_length();
    throw ConfigError(os.str());
  }
}

bool within(double a, double b, double tol) {
  if (a == 0.0 && b == 0.0) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

EnvelopeReport check_kernel_envelope(const ResolventParams& params, const Grid& grid,
                                     const KernelEnvelope& envelope,
                                     const EnvelopeOptions& opts) {
  check_exponents(params, envelope);
  check_kernel_preconditions(params, grid, opts.enforce_decay);
  const double rmax = opts.max_radius_fraction * grid.box_length();

  EnvelopeReport rep;
  rep.refinement_tolerance = opts.refinement_tolerance;
  rep.coarse = measure_envelope(resolvent_kernel(params, grid), envelope, rmax);
  rep.finite = std::isfinite(rep.coarse.max_ratio_small) && std::isfinite(rep.coarse.max_ratio_large);
  rep.refinement_stable = true;
  if (opts.refine) {
    const Grid fine(grid.dim(), 2 * grid.points_per_axis(), grid.box_length());
    rep.fine = measure_envelope(resolvent_kernel(params, fine), envelope, rmax);
    rep.finite = rep.finite && std::isfinite(rep.fine.max_ratio_small) &&
                 std::isfinite(rep.fine.max_ratio_large);
    // Only radii both levels resolve take part in the comparison.
    const bool coarse_small = std::any_of(rep.coarse.samples.begin(), rep.coarse.samples.end(),
                                          [&](const RaySample& s) { return s.r <= envelope.crossover_radius; });
    rep.refinement_stable =
        within(rep.coarse.max_ratio_large, rep.fine.max_ratio_large, opts.refinement_tolerance) &&
        (!coarse_small ||
         within(rep.coarse.max_ratio_small, rep.fine.max_ratio_small, opts.refinement_tolerance));
  }
  rep.pass = rep.finite && rep.refinement_stable;
  return rep;
}

double SplitKernelSpec::operator()(double xi_over_k) const {
  const double d = std::abs(xi_over_k - 1.0);
  if (d <= psi_plateau) return 1.0;
  if (d >= psi_support) return 0.0;
  return 1.0 - smoothstep7((d - psi_plateau) / (psi_support - psi_plateau));
}

SlopeFit fit_decay(const std::vector<RaySample>& samples, double r_lo, double r_hi,
                   double wavelength) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const RaySample& s = samples[i];
    if (s.r < r_lo || s.r > r_hi) continue;
    double v = std::abs(s.value);
    if (wavelength > 0.0) {
      for (const RaySample& o : samples)
        if (o.ray == s.ray && std::abs(o.r - s.r) <= 0.5 * wavelength)
          v = std::max(v, std::abs(o.value));
    }
    if (v > 0.0) pts.emplace_back(std::log(s.r), std::log(v));
  }
  SlopeFit fit;
  fit.r_lo = r_lo;
  fit.r_hi = r_hi;
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double den = m * sxx - sx * sx;
  if (den <= 0.0) return fit;
  fit.slope = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / m;
  double rss = 0.0;
  for (auto [x, y] : pts) {
    const double e = y - fit.intercept - fit.slope * x;
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

SplitKernelResult split_kernel(const ResolventParams& params, const SplitKernelSpec& spec,
                               const Grid& grid, const DecayRanges& ranges) {
  check_kernel_preconditions(params, grid, true);
  if (!(spec.psi_plateau > 0.0 && spec.psi_plateau < spec.psi_support))
    throw ConfigError("split kernel needs 0 < psi_plateau < psi_support");
  const ComplexField m = build_multiplier(params, grid);
  const double k = params.k();
  const std::vector<double> xi = grid.frequency_norm();
  ComplexField m1(grid, Space::spectral);
  ComplexField m2(grid, Space::spectral);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double psi = spec(xi[i] / k);
    m1[i] = psi * m[i];
    m2[i] = m[i] - m1[i];
  }

  SplitKernelResult out{synthesize_kernel(m1), synthesize_kernel(m2), {}, {}, {}, 0.0, 0.0};
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (std::abs(xi[i] / k - 1.0) <= spec.psi_plateau)
      out.plateau_max_k2_hat = std::max(out.plateau_max_k2_hat, std::abs(m2[i]));

  const ComplexField K = synthesize_kernel(m);
  double diff = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    diff = std::max(diff, std::abs(out.k1[i] + out.k2[i] - K[i]));
    top = std::max(top, std::abs(K[i]));
  }
  out.partition_error = top > 0.0 ? diff / top : diff;

  const KernelEnvelope env = KernelEnvelope::for_params(params.n, params.s);
  const double rmax = ranges.large_hi_fraction * grid.box_length();
  const std::vector<RaySample> s2 = sample_rays(out.k2, rmax, env);
  const std::vector<RaySample> s1 = sample_rays(out.k1, rmax, env);
  const double h = grid.spacing();
  out.k2_small = fit_decay(s2, ranges.small_lo_cells * h, ranges.small_hi / k);
  out.k2_large = fit_decay(s2, ranges.large_lo / k, rmax);
  out.k1_envelope = fit_decay(s1, ranges.large_lo / k, rmax, 2.0 * std::numbers::pi / k);
  return out;
}

}  // namespace fhelm
