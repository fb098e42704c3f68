#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fhelm/dual.hpp"

namespace fhelm {

struct MountainPassConfig {
  int pairs = 2;
  double tol = 1e-5;  // relative gradient norm accepted for a critical point
  std::uint64_t seed = 1;
  double init_noise = 0.1;
  int lbfgs_max_iter = 3000;
  int newton_max_iter = 20;
  double newton_tol = 1e-12;
  int gmres_restart = 60;
  int gmres_max_restarts = 20;
  double gmres_rtol = 1e-10;
  int sphere_samples = 16;
  double rho_fraction = 0.5;  // rho = rho_fraction * C^{-1/(2-p')}
  double distinct_overlap = 0.99;
  bool recenter = true;  // integer-cell recentering for periodic weights
  int ps_stride = 1;
  std::optional<Vec> initial;  // start for the first pair in w = Q^{1/p} u variables
};

/// One entry of the Palais-Smale trace, evaluated at the optimizer iterate
/// rescaled onto its ray maximum.
struct PsRecord {
  int pair = 0;
  int iteration = 0;
  double J = 0.0;
  double gradient_norm = 0.0;  // ||grad J||_2
  double norm_pp = 0.0;        // ||v||_{p'}^{p'}
  double bound = 0.0;          // (1/p' - 1/2)^{-1} (sup J + ||grad||_2 ||v||_2)
  bool holds = true;
};

struct GeometryCertificate {
  double operator_norm = 0.0;  // C, largest sampled <v, K_p v> / ||v||_{p'}^2
  double rho = 0.0;
  double delta = 0.0;  // (1/p') rho^{p'} - (C/2) rho^2
  double sphere_min_J = 0.0;
  int sphere_samples = 0;
  double endpoint_J = 0.0;     // J(v0) < 0
  double endpoint_norm = 0.0;  // ||v0||_{p'} > rho
  double path_max_J = 0.0;     // max of J on the segment [0, v0]
  bool sphere_ok = false;
  bool endpoint_ok = false;
};

struct CriticalPair {
  std::string sector;
  DualState state;      // +v*; -v* is the partner
  double J_minus = 0.0;
  double relative_gradient_minus = 0.0;
  RecoveredSolution solution;
  int lbfgs_iterations = 0;
  double lbfgs_relative_gradient = 0.0;
  int newton_iterations = 0;
  double newton_residual = 0.0;
  double max_overlap = 0.0;  // largest |cos| against earlier pairs
  bool accepted = false;
  std::string note;
};

struct MountainPassResult {
  std::vector<CriticalPair> pairs;
  GeometryCertificate certificate;
  std::vector<PsRecord> ps_trace;
  Index recenter_shift{};  // lattice shift applied to the first initial guess
  int accepted_pairs() const;
  std::string to_json() const;
};

struct NewtonResult {
  Vec u;
  int iterations = 0;
  double residual = 0.0;  // ||u - Psi(Q|u|^{p-2}u)||_2 / ||u||_2
  bool converged = false;
};

// Newton-GMRES on u = Psi(Q |u|^{p-2} u).
NewtonResult newton_polish(const DualProblem& problem, Vec u, const MountainPassConfig& cfg);

// Critical points of J as maximizers of <v, K_p v> / ||v||_{p'}^2 (one per
// symmetry sector), rescaled onto their ray maximum and polished by Newton.
MountainPassResult mountain_pass_solve(const DualProblem& problem, const MountainPassConfig& cfg);

struct RefinementCheck {
  double coarse_sup = 0.0;
  double fine_sup = 0.0;
  double relative_change = 0.0;
  double fine_relative_gradient = 0.0;
  int newton_iterations = 0;
  bool converged = false;
};

// Prolongs u to the fine problem's grid and re-solves there with Newton.
RefinementCheck refine_solution(const DualProblem& coarse, const Vec& u, const DualProblem& fine,
                                const MountainPassConfig& cfg);

// Integer-cell lattice shift moving the circular centroid of w^2 into the
// central cell.
Index recenter_offset(const Grid& grid, const Vec& w, int cell_points);

}  // namespace fhelm
