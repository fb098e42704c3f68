#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fhelm/grid.hpp"
#include "fhelm/resolvent.hpp"

namespace fhelm {

struct IterationRecord {
  int iteration = 0;
  double increment = 0.0;  // ||u_{k+1} - u_k|| in the solver norm
  double ratio = 0.0;      // increment_k / increment_{k-1}; 0 on the first step
  double residual = 0.0;   // ||u_k - T(u_k)|| / ||u_k||
  double norm = 0.0;       // ||u_k||
};

struct ContractionConfig {
  double t = 3.0;
  double q = 4.0;
  double ball_radius = 0.0;  // 0: choose from the measured operator norm
  int max_iter = 200;
  double tol = 1e-10;
  double damping = 1.0;
  bool check_window = true;  // require q inside the exponent-case window for (n, s, t)
  bool dealias = false;      // 2/3-rule filter on the nonlinear term
  int stall_limit = 5;       // consecutive ratios >= 1 that abort the run
  bool eps_from_floor = true;   // solve at eps_floor instead of params.epsilon
  bool extrapolate_final = true;  // one limiting-absorption pass on the last iterate
};

struct ContractionTrace {
  std::vector<IterationRecord> records;
  double epsilon = 0.0;           // absorption used inside the solver
  double operator_norm = 0.0;     // measured L^{q/t} -> L^q norm C of the resolvent
  double phi_norm = 0.0;          // ||phi||_q
  double ball_radius = 0.0;
  double lipschitz_surrogate = 0.0;  // t C a^{t-1}
  double max_tail_ratio = 0.0;    // max ratio after the first three iterations
  bool converged = false;
  std::string to_json() const;
};

struct ContractionResult {
  ComplexField u;
  ContractionTrace trace;
  double fixed_point_residual = 0.0;  // ||u - phi - R(|u|^{t-1}u)||_q / ||u||_q
  double strong_residual = 0.0;       // ||A_eps (u - phi) - |u|^{t-1}u||_2 / ||u||_2
  std::optional<ComplexField> u_limit;  // phi + lim_{eps -> 0} R_eps(|u|^{t-1}u)
};

// Smaller positive root of a = delta + C a^t, or nullopt when none exists.
std::optional<double> ball_radius_root(double C, double delta, double t);

// Largest ||R f||_q / ||f||_{q/t} over Gaussian and modulated test fields.
double measure_operator_norm(const ResolventParams& params, const Grid& grid, double p, double q);

// Picard iteration for u = phi + R(|u|^{t-1} u) in the L^q ball of radius a.
ContractionResult solve_contraction(const ComplexField& phi, const ResolventParams& params,
                                    const ContractionConfig& cfg,
                                    const ComplexField* initial = nullptr);

enum class NonlinearityKind { zero, linear, saturating };

// f(x, u) = Q(x) g(u) + b(x) with g in {0, u, u / (1 + |u| / saturation)}.
struct PointwiseNonlinearity {
  NonlinearityKind kind = NonlinearityKind::linear;
  ComplexField Q;
  ComplexField b;
  double saturation = 1.0;

  PointwiseNonlinearity(const Grid& g) : Q(g), b(g) {}
  ComplexField apply(const ComplexField& u) const;
  // sup_x <x>^alpha |Q(x)| times the Lipschitz constant of g.
  double weighted_lipschitz(double alpha) const;
};

struct LipschitzConfig {
  double alpha = 3.0;
  double kappa_est = 0.0;  // bound for R in L^inf_alpha -> L^inf; 0 means unknown
  double margin = 1.0;     // contraction asserted when kappa_est * l_alpha < margin
  int max_iter = 500;
  double tol = 1e-10;
  double fallback_damping = 0.5;
};

struct LipschitzResult {
  ComplexField u;
  std::vector<IterationRecord> trace;
  double lipschitz_const = 0.0;  // l_alpha
  double observed_rate = 0.0;    // geometric mean of the last increment ratios
  bool contraction_asserted = false;
  bool used_damping = false;
  double residual = 0.0;         // ||u - phi - R f(u)||_inf / ||u||_inf
};

LipschitzResult solve_lipschitz(const ComplexField& phi, const ResolventParams& params,
                                const PointwiseNonlinearity& f, const LipschitzConfig& cfg);

struct BranchConfig {
  double tol = 1e-10;
  int max_corrector = 100;
  double jump_factor = 10.0;  // allowed d||u||_inf / (d mu ||phi||_inf)
};

struct BranchStep {
  double mu = 0.0;
  ComplexField u;
  int corrector_iterations = 0;
  double residual = 0.0;
  double sup_norm = 0.0;
};

struct BranchResult {
  std::vector<BranchStep> steps;
  bool truncated = false;
  std::string reason;  // why the path stopped early
};

// Continuation of u = R(Q |u|^{p-2} u) + mu phi along an increasing mu path starting at 0.
BranchResult continue_branch(const ComplexField& Q, double p_power, const ComplexField& phi,
                             const std::vector<double>& mu_path, const ResolventParams& params,
                             const BranchConfig& cfg = {});

// 2/3-rule: zero every mode with |k_a| > N/3 on some axis.
ComplexField dealias_two_thirds(const ComplexField& f);

}  // namespace fhelm
