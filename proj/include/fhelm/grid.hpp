#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace fhelm {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 8;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Space { physical, spectral };

using Point = std::array<double, kMaxDim>;
using Index = std::array<int, kMaxDim>;

/// Uniform periodic box [-L/2, L/2)^n with N points per axis.
///
/// Physical lattice: x_j = -L/2 + j h, h = L/N.
/// Frequency lattice: xi_k = k * 2 pi / L with k in [-N/2, N/2); storage follows
/// the FFT order, so array index m holds k = m for m < N/2 and k = m - N otherwise.
class Grid {
 public:
  Grid(int n, int points_per_axis, double box_length);

  int dim() const { return n_; }
  int points_per_axis() const { return N_; }
  double box_length() const { return L_; }
  double spacing() const { return L_ / N_; }
  double freq_spacing() const;
  double cell_volume() const;
  std::size_t size() const { return size_; }

  double coordinate(int j) const { return -0.5 * L_ + j * spacing(); }
  int wavenumber(int m) const { return m < N_ / 2 ? m : m - N_; }
  double frequency(int m) const { return wavenumber(m) * freq_spacing(); }

  Index unravel(std::size_t flat) const;
  std::size_t ravel(const Index& idx) const;
  Point position(std::size_t flat) const;
  Point frequency_vector(std::size_t flat) const;

  std::vector<double> radius() const;          // |x| per lattice point
  std::vector<double> frequency_norm() const;  // |xi| per lattice point

  // Largest |xi| representable along every axis direction.
  double nyquist() const { return 0.5 * N_ * freq_spacing(); }

  bool operator==(const Grid& o) const { return n_ == o.n_ && N_ == o.N_ && L_ == o.L_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int n_;
  int N_;
  double L_;
  std::size_t size_;
};

/// Complex samples on a Grid, tagged with the space they live in.
class ComplexField {
 public:
  explicit ComplexField(const Grid& g, Space space = Space::physical);
  ComplexField(const Grid& g, std::vector<cplx> values, Space space);

  const Grid& grid() const { return grid_; }
  Space space() const { return space_; }
  std::size_t size() const { return values_.size(); }

  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx* data() { return values_.data(); }
  const cplx* data() const { return values_.data(); }

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(cplx a);

  static ComplexField sample(const Grid& g, const std::function<cplx(const Point&)>& fn);

 private:
  Grid grid_;
  Space space_;
  std::vector<cplx> values_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx a, ComplexField f);

// Unitary transform: F(xi_k) = N^{-n/2} sum_j f(x_j) exp(-i xi_k . x_j).
ComplexField to_spectrum(const ComplexField& f);
ComplexField from_spectrum(const ComplexField& F);

// (sum |f|^p h^n)^{1/p} in either space; p = kInf gives max |f|.
double lp_norm(const ComplexField& f, double p);
double weighted_sup_norm(const ComplexField& f, double alpha);

// Euclidean inner product sum conj(a) b h^n and the bilinear form sum a b h^n.
cplx inner(const ComplexField& a, const ComplexField& b);
cplx bilinear(const ComplexField& a, const ComplexField& b);

// g(x) = f(x - a) for a lattice offset a given in points per axis.
ComplexField lattice_shift(const ComplexField& f, const Index& offset);

// Reflection x -> -x along one axis (index j -> (N - j) mod N).
ComplexField reflect(const ComplexField& f, int axis);

// Spectral interpolation onto a finer (or equal) grid with the same box length.
ComplexField prolong(const ComplexField& f, const Grid& fine);

// Pointwise multiplication by a spectral multiplier, physical in and out.
ComplexField apply_multiplier(const ComplexField& f, const ComplexField& multiplier);

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* where);
void require_space(const ComplexField& f, Space s, const char* where);

}  // namespace fhelm
