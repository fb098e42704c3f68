#include "fhelm/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fhelm/errors.hpp"

namespace fhelm {

namespace {

constexpr double kPi = std::numbers::pi;

// Taylor coefficients of 1/Gamma(1 + x) about 0.
constexpr std::array<double, 25> kInvGamma1p = {
    1.00000000000000000e+00,  5.77215664901532866e-01,  -6.55878071520253902e-01,
    -4.20026350340952370e-02, 1.66538611382291479e-01,  -4.21977345555443334e-02,
    -9.62197152787697303e-03, 7.21894324666309990e-03,  -1.16516759185906517e-03,
    -2.15241674114950975e-04, 1.28050282388116196e-04,  -2.01348547807882387e-05,
    -1.25049348214267063e-06, 1.13302723198169593e-06,  -2.05633841697760707e-07,
    6.11609510448141609e-09,  5.00200764446922295e-09,  -1.18127457048702004e-09,
    1.04342671169110054e-10,  7.78226343990507081e-12,  -3.69680561864220598e-12,
    5.10037028745447575e-13,  -2.05832605356650664e-14, -5.34812253942301782e-15,
    1.22677862823826084e-15};

struct TemmeGammas {
  double gam1;   // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
  double gam2;   // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
  double gampl;  // 1/Gamma(1+mu)
  double gammi;  // 1/Gamma(1-mu)
};

TemmeGammas temme_gammas(double mu) {
  // Odd and even parts of the series give gam1 and gam2 without cancellation.
  double even = 0.0;
  double odd = 0.0;
  for (int j = static_cast<int>(kInvGamma1p.size()) - 1; j >= 0; --j) {
    if (j % 2 == 0)
      even = even * mu * mu + kInvGamma1p[j];
    else
      odd = odd * mu * mu + kInvGamma1p[j];
  }
  TemmeGammas g{};
  g.gam1 = -odd;
  g.gam2 = even;
  g.gampl = even + mu * odd;
  g.gammi = even - mu * odd;
  return g;
}

// Hankel expansion of H^{(1)}_nu(x) for large x; exact for half-integer nu.
std::complex<double> hankel1_asymptotic(double nu, double x) {
  const double m = 4.0 * nu * nu;
  std::complex<double> sum = 1.0;
  std::complex<double> term = 1.0;
  const std::complex<double> i_over_8x(0.0, 1.0 / (8.0 * x));
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (m - odd * odd) / k * i_over_8x;
    const double size = std::abs(term);
    if (size == 0.0) break;
    if (size > last) break;
    sum += term;
    last = size;
    if (size < 0.25 * std::numeric_limits<double>::epsilon()) break;
  }
  const std::complex<double> carrier(std::cos(x), std::sin(x));
  const double shift = -(0.5 * nu + 0.25) * kPi;
  const std::complex<double> rotation(std::cos(shift), std::sin(shift));
  return std::sqrt(2.0 / (kPi * x)) * carrier * rotation * sum;
}

bool use_asymptotic(double nu, double x) { return x >= 25.0 + nu * nu; }

}  // namespace

double inv_gamma_1p(double x) {
  if (!(std::abs(x) <= 0.5)) throw DomainError("inv_gamma_1p requires |x| <= 1/2");
  return temme_gammas(x).gampl;
}

BesselJY bessel_jy(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_jy requires finite x > 0");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("bessel_jy requires nu >= 0");

  if (use_asymptotic(nu + 1.0, x)) {
    const std::complex<double> h0 = hankel1_asymptotic(nu, x);
    const std::complex<double> h1 = hankel1_asymptotic(nu + 1.0, x);
    return {h0.real(), h0.imag(), nu / x * h0.real() - h1.real(), nu / x * h0.imag() - h1.imag()};
  }

  constexpr int kMaxIter = 100000;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  constexpr double kSeriesLimit = 2.0;

  const int nl = x < kSeriesLimit ? static_cast<int>(nu + 0.5)
                                  : std::max(0, static_cast<int>(nu - x + 1.5));
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / kPi;

  // Continued fraction for J'_nu / J_nu.
  int isign = 1;
  double h = std::max(nu * xi, kTiny);
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int it = 0;
  for (; it < kMaxIter; ++it) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b - 1.0 / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  if (it == kMaxIter) throw ConvergenceError("bessel_jy: first continued fraction did not converge");

  double rjl = isign * kTiny;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  const double rjp1 = rjpl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double tmp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * tmp - rjl;
    rjl = tmp;
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double rjmu, rymu, rymup, ry1;
  if (x < kSeriesLimit) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fct = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2);
    double e = mu * dd;
    const double fct2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(mu);
    double ff = 2.0 / kPi * fct * (g.gam1 * std::cosh(e) + g.gam2 * fct2 * dd);
    e = std::exp(e);
    double p = e / (g.gampl * kPi);
    double q = 1.0 / (e * kPi * g.gammi);
    const double pimu2 = 0.5 * pimu;
    const double fct3 = std::abs(pimu2) < kEps ? 1.0 : std::sin(pimu2) / pimu2;
    const double r = kPi * pimu2 * fct3 * fct3;
    double cc = 1.0;
    dd = -x2 * x2;
    double sum = ff + r * q;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      cc *= dd / i;
      p /= i - mu;
      q /= i + mu;
      const double del = cc * (ff + r * q);
      sum += del;
      sum1 += cc * p - i * del;
      if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) break;
    }
    if (i > kMaxIter) throw ConvergenceError("bessel_jy: Temme series did not converge");
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = mu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    // Steed's method for the complex continued fraction p + iq.
    double a = 0.25 - mu2;
    double p = -0.5 * xi;
    double q = 1.0;
    const double br = 2.0 * x;
    double bi = 2.0;
    double fct = a * xi / (p * p + q * q);
    double cr = br + q * fct;
    double ci = bi + p * fct;
    double den = br * br + bi * bi;
    double dr = br / den;
    double di = -bi / den;
    double dlr = cr * dr - ci * di;
    double dli = cr * di + ci * dr;
    double tmp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = tmp;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
      a += 2 * (i - 1);
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::abs(dr) + std::abs(di) < kTiny) dr = kTiny;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::abs(cr) + std::abs(ci) < kTiny) cr = kTiny;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      tmp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = tmp;
      if (std::abs(dlr - 1.0) + std::abs(dli) <= kEps) break;
    }
    if (i > kMaxIter) throw ConvergenceError("bessel_jy: second continued fraction did not converge");
    const double gam = (p - f) / q;
    rjmu = std::copysign(std::sqrt(w / ((p - f) * gam + q)), rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = mu * xi * rymu - rymup;
  }

  const double scale = rjmu / rjl;
  BesselJY out{};
  out.j = rjl1 * scale;
  out.jp = rjp1 * scale;
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = next;
  }
  out.y = rymu;
  out.yp = nu * xi * rymu - ry1;
  return out;
}

std::complex<double> hankel1(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("hankel1 requires z > 0");
  if (!(nu >= 0.0)) throw DomainError("hankel1 requires nu >= 0");
  if (use_asymptotic(nu, z)) return hankel1_asymptotic(nu, z);
  const BesselJY b = bessel_jy(nu, z);
  return {b.j, b.y};
}

std::complex<double> green_classical(int n, double lambda, double r) {
  if (n < 3) throw DomainError("green_classical requires n >= 3");
  if (!(lambda > 0.0)) throw DomainError("green_classical requires lambda > 0");
  if (!(r > 0.0)) throw DomainError("green_classical requires r > 0");
  const double k = std::sqrt(lambda);
  const double nu = 0.5 * (n - 2);
  const double pref = std::pow(k / (2.0 * kPi * r), nu);
  return std::complex<double>(0.0, 0.25) * pref * hankel1(nu, k * r);
}

}  // namespace fhelm
