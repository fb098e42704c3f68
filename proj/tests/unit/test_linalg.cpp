#include <doctest.h>

#include <cmath>
#include <random>

#include "fhelm/linalg.hpp"

using namespace fhelm;

namespace {

// Dense solve by Gaussian elimination with partial pivoting.
Vec dense_solve(std::vector<Vec> A, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace

TEST_CASE("gmres matches a dense solve") {
  const std::size_t n = 40;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<Vec> A(n, Vec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i][j] = (i == j ? 4.0 : 0.0) + 0.3 * nd(rng);
  Vec b(n);
  for (auto& v : b) v = nd(rng);
  const LinearMap op = [&](const Vec& x, Vec& y) {
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += A[i][j] * x[j];
  };
  const GmresResult r = gmres(op, b, Vec(n, 0.0), 10, 50, 1e-12);
  CHECK(r.converged);
  CHECK(r.rel_residual <= 1e-12);
  const Vec x = dense_solve(A, b);
  for (std::size_t i = 0; i < n; ++i) CHECK(r.x[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("gmres with a zero right-hand side") {
  const LinearMap id = [](const Vec& x, Vec& y) { y = x; };
  const GmresResult r = gmres(id, Vec(5, 0.0), Vec(5, 0.0), 5, 1, 1e-12);
  CHECK(r.converged);
  CHECK(norm2(r.x) == 0.0);
}

TEST_CASE("lbfgs minimizes the Rosenbrock function") {
  const Objective rosen = [](const Vec& x, Vec& g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g = {-2.0 * a - 400.0 * x[0] * b, 200.0 * b};
    return a * a + 100.0 * b * b;
  };
  int calls = 0;
  const LbfgsResult r = lbfgs(rosen, {-1.2, 1.0}, LbfgsOptions{}, [&](int, const Vec&, double, const Vec&) { ++calls; });
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(calls == r.iterations);
}

TEST_CASE("dot and norm") {
  CHECK(dot({1, 2, 3}, {4, 5, 6}) == 32.0);
  CHECK(norm2({3, 4}) == 5.0);
}
