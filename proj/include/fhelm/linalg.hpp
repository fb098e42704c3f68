#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fhelm {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);

using LinearMap = std::function<void(const Vec& x, Vec& y)>;

struct GmresResult {
  Vec x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Restarted GMRES(restart) with Givens rotations.
GmresResult gmres(const LinearMap& A, const Vec& b, const Vec& x0, int restart, int max_restarts,
                  double rtol);

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 3000;
  double grad_tol = 1e-12;  // stop when max |g_i| <= grad_tol
  double f_tol = 1e-15;     // stop when the relative decrease falls below f_tol
  int max_linesearch = 40;
};

struct LbfgsResult {
  Vec x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

// Returns f(x) and writes the gradient.
using Objective = std::function<double(const Vec& x, Vec& grad)>;
// Called after every accepted step with (iteration, x, f, grad).
using LbfgsCallback = std::function<void(int, const Vec&, double, const Vec&)>;

// Limited-memory BFGS with a strong Wolfe line search.
LbfgsResult lbfgs(const Objective& f, Vec x0, const LbfgsOptions& opts = {},
                  const LbfgsCallback& callback = {});

}  // namespace fhelm
