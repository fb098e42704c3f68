#include "fhelm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "fhelm/errors.hpp"

namespace fhelm {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Multiplies entry m by (-1)^{sum m_i}; moves the DFT phase origin to x = 0.
void checkerboard(const Grid& g, cplx* data) {
  const int N = g.points_per_axis();
  const std::size_t size = g.size();
  for (std::size_t flat = 0; flat < size; ++flat) {
    std::size_t rest = flat;
    int parity = 0;
    for (int a = 0; a < g.dim(); ++a) {
      parity += static_cast<int>(rest % N);
      rest /= N;
    }
    if (parity & 1) data[flat] = -data[flat];
  }
}

}  // namespace

Grid::Grid(int n, int points_per_axis, double box_length)
    : n_(n), N_(points_per_axis), L_(box_length), size_(1) {
  if (n < 1 || n > kMaxDim)
    throw ConfigError("grid dimension must satisfy 1 <= n <= " + std::to_string(kMaxDim));
  if (points_per_axis < 4 || !is_power_of_two(points_per_axis))
    throw ConfigError("points_per_axis must be a power of two and >= 4");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw ConfigError("box_length must be positive and finite");
  for (int a = 0; a < n; ++a) size_ *= static_cast<std::size_t>(N_);
}

double Grid::freq_spacing() const { return 2.0 * std::numbers::pi / L_; }

double Grid::cell_volume() const { return std::pow(spacing(), n_); }

Index Grid::unravel(std::size_t flat) const {
  Index idx{};
  for (int a = n_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % N_);
    flat /= N_;
  }
  return idx;
}

std::size_t Grid::ravel(const Index& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < n_; ++a) {
    int j = ((idx[a] % N_) + N_) % N_;
    flat = flat * N_ + j;
  }
  return flat;
}

Point Grid::position(std::size_t flat) const {
  Index idx = unravel(flat);
  Point x{};
  for (int a = 0; a < n_; ++a) x[a] = coordinate(idx[a]);
  return x;
}

Point Grid::frequency_vector(std::size_t flat) const {
  Index idx = unravel(flat);
  Point xi{};
  for (int a = 0; a < n_; ++a) xi[a] = frequency(idx[a]);
  return xi;
}

std::vector<double> Grid::radius() const {
  std::vector<double> r(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    Point x = position(i);
    double s = 0.0;
    for (int a = 0; a < n_; ++a) s += x[a] * x[a];
    r[i] = std::sqrt(s);
  }
  return r;
}

std::vector<double> Grid::frequency_norm() const {
  std::vector<double> r(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    Point xi = frequency_vector(i);
    double s = 0.0;
    for (int a = 0; a < n_; ++a) s += xi[a] * xi[a];
    r[i] = std::sqrt(s);
  }
  return r;
}

//--------------------------------------------------------------------------
// ComplexField

ComplexField::ComplexField(const Grid& g, Space space)
    : grid_(g), space_(space), values_(g.size(), cplx(0.0, 0.0)) {}

ComplexField::ComplexField(const Grid& g, std::vector<cplx> values, Space space)
    : grid_(g), space_(space), values_(std::move(values)) {
  if (values_.size() != g.size())
    throw UsageError("field length " + std::to_string(values_.size()) +
                     " does not match grid size " + std::to_string(g.size()));
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_grid(*this, o, "operator+=");
  if (space_ != o.space_) throw UsageError("operator+=: space tags differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_grid(*this, o, "operator-=");
  if (space_ != o.space_) throw UsageError("operator-=: space tags differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx a) {
  for (auto& v : values_) v *= a;
  return *this;
}

ComplexField ComplexField::sample(const Grid& g, const std::function<cplx(const Point&)>& fn) {
  ComplexField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = fn(g.position(i));
  return f;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx a, ComplexField f) { return f *= a; }

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* where) {
  if (a.grid() != b.grid()) throw UsageError(std::string(where) + ": grid mismatch");
}

void require_space(const ComplexField& f, Space s, const char* where) {
  if (f.space() != s)
    throw UsageError(std::string(where) + ": expected a " +
                     (s == Space::physical ? "physical" : "spectral") + " field");
}

//--------------------------------------------------------------------------
// Transforms

ComplexField to_spectrum(const ComplexField& f) {
  require_space(f, Space::physical, "to_spectrum");
  const Grid& g = f.grid();
  std::vector<cplx> v = f.values();
  detail::fft_inplace(g, v.data(), -1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
  for (auto& c : v) c *= scale;
  checkerboard(g, v.data());
  return ComplexField(g, std::move(v), Space::spectral);
}

ComplexField from_spectrum(const ComplexField& F) {
  require_space(F, Space::spectral, "from_spectrum");
  const Grid& g = F.grid();
  std::vector<cplx> v = F.values();
  checkerboard(g, v.data());
  detail::fft_inplace(g, v.data(), +1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
  for (auto& c : v) c *= scale;
  return ComplexField(g, std::move(v), Space::physical);
}

ComplexField apply_multiplier(const ComplexField& f, const ComplexField& multiplier) {
  require_space(f, Space::physical, "apply_multiplier");
  require_space(multiplier, Space::spectral, "apply_multiplier");
  require_same_grid(f, multiplier, "apply_multiplier");
  const Grid& g = f.grid();
  std::vector<cplx> v = f.values();
  detail::fft_inplace(g, v.data(), -1);
  const double scale = 1.0 / static_cast<double>(g.size());
  const auto& m = multiplier.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= m[i] * scale;
  detail::fft_inplace(g, v.data(), +1);
  return ComplexField(g, std::move(v), Space::physical);
}

//--------------------------------------------------------------------------
// Norms and lattice operations

double lp_norm(const ComplexField& f, double p) {
  if (std::isnan(p) || p < 1.0) throw DomainError("lp_norm requires p >= 1 or p = infinity");
  const auto& v = f.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
  }
  // Scaling by the max keeps large p from overflowing.
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& c : v) s += std::norm(c / m);
  } else {
    for (const auto& c : v) s += std::pow(std::abs(c) / m, p);
  }
  return m * std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double weighted_sup_norm(const ComplexField& f, double alpha) {
  require_space(f, Space::physical, "weighted_sup_norm");
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point x = g.position(i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += x[a] * x[a];
    m = std::max(m, std::pow(1.0 + r2, 0.5 * alpha) * std::abs(f[i]));
  }
  return m;
}

cplx inner(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "inner");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().cell_volume();
}

cplx bilinear(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "bilinear");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

ComplexField lattice_shift(const ComplexField& f, const Index& offset) {
  const Grid& g = f.grid();
  ComplexField out(g, f.space());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Index idx = g.unravel(i);
    for (int a = 0; a < g.dim(); ++a) idx[a] -= offset[a];
    out[i] = f[g.ravel(idx)];
  }
  return out;
}

ComplexField reflect(const ComplexField& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw UsageError("reflect: axis out of range");
  ComplexField out(g, f.space());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Index idx = g.unravel(i);
    idx[axis] = -idx[axis];
    out[i] = f[g.ravel(idx)];
  }
  return out;
}

ComplexField prolong(const ComplexField& f, const Grid& fine) {
  require_space(f, Space::physical, "prolong");
  const Grid& g = f.grid();
  if (fine.dim() != g.dim() || fine.box_length() != g.box_length() ||
      fine.points_per_axis() < g.points_per_axis())
    throw UsageError("prolong: target grid must share dimension and box and be finer");
  ComplexField F = to_spectrum(f);
  ComplexField Ff(fine, Space::spectral);
  const int N = g.points_per_axis();
  const int Nf = fine.points_per_axis();
  const double scale = std::pow(static_cast<double>(Nf) / N, 0.5 * g.dim());
  const int n = g.dim();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Index idx = g.unravel(i);
    // The coarse Nyquist mode splits evenly between +N/2 and -N/2 on the fine grid.
    int nyq_axes = 0;
    Index k{};
    for (int a = 0; a < n; ++a) {
      k[a] = g.wavenumber(idx[a]);
      if (k[a] == -N / 2 && Nf > N) ++nyq_axes;
    }
    const int combos = 1 << nyq_axes;
    const double share = 1.0 / combos;
    for (int c = 0; c < combos; ++c) {
      Index fi{};
      int bit = 0;
      for (int a = 0; a < n; ++a) {
        int kk = k[a];
        if (kk == -N / 2 && Nf > N) {
          if ((c >> bit) & 1) kk = N / 2;
          ++bit;
        }
        fi[a] = (kk + Nf) % Nf;
      }
      Ff[fine.ravel(fi)] += F[i] * scale * share;
    }
  }
  return from_spectrum(Ff);
}

}  // namespace fhelm
