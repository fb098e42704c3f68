#pragma once

#include <complex>

namespace fhelm {

struct BesselJY {
  double j;
  double y;
  double jp;  // derivative of J
  double yp;  // derivative of Y
};

// J_nu, Y_nu and derivatives for nu >= 0, x > 0. Temme's series below x = 2,
// Steed's continued fractions up to x = 25 + nu^2, Hankel's expansion beyond.
BesselJY bessel_jy(double nu, double x);

// H^{(1)}_nu(z) = J_nu(z) + i Y_nu(z).
std::complex<double> hankel1(double nu, double z);

// Outgoing Green function of -Delta - lambda in R^n:
// (i/4) (sqrt(lambda) / (2 pi r))^{(n-2)/2} H^{(1)}_{(n-2)/2}(sqrt(lambda) r).
std::complex<double> green_classical(int n, double lambda, double r);

// 1/Gamma(1 + x) for |x| <= 1/2 from its Taylor series.
double inv_gamma_1p(double x);

}  // namespace fhelm
