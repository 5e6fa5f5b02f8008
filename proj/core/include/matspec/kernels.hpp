#pragma once

#include <vector>

#include "matspec/types.hpp"

namespace matspec {

cd sinc(cd z);

// F[a,b] = (F(a) - F(b))/(a - b) with F(a) = sin(a x)/a; F[a,a] = F'(a).
cd sin_ratio_divdiff(double x, cd a, cd b);

// Cosine model phi~(x, rho^2) = cos(rho x).
// D(x, theta^2, rho^2) = int_0^x cos(theta t) cos(rho t) dt.
cd cos_product_integral(double x, cd theta, cd rho);
cd cos_product_integral_dx(double x, cd theta, cd rho);
// (cos(rho x) - cos(rt x)) / (rho - rt)
cd wtilde(double x, cd rho, double rt);
cd wtilde_dx(double x, cd rho, double rt);
// (D(x, theta, rho) - D(x, theta, rt)) / (rho - rt)
cd Wtilde(double x, cd theta, cd rho, double rt);
cd Wtilde_dx(double x, cd theta, cd rho, double rt);

// Sine model phi~(x, rho^2) = sin(rho x)/rho.
cd sin_over(double x, cd rho);  // sin(rho x)/rho
cd sin_product_integral(double x, cd theta, cd rho);
cd sin_product_integral_dx(double x, cd theta, cd rho);
cd sin_wtilde(double x, cd rho, double rt);
cd sin_wtilde_dx(double x, cd rho, double rt);
cd sin_Wtilde(double x, cd theta, cd rho, double rt);
cd sin_Wtilde_dx(double x, cd theta, cd rho, double rt);

// xi_n = sum_k |rho_nk - rho~_n| + ||beta_n - beta~_n|| against L(0,0,0).
std::vector<double> xi_sequence(const SpectralData& d);

// Row vector psi~(x) and block matrix R~(x) of the main equation
// psi~ = psi (I + R~) for bands n <= N. Block index p = (n-1)(m+1) + (k-1)
// occupies columns [p m, p m + m).
struct AssembledSystem {
  double x = 0;
  int N = 0;
  int m = 1;
  int cols = 0;  // blocks per band
  CMat psi;      // m x (N cols m)
  CMat R;        // (N cols m) x (N cols m)
  CMat dpsi;
  CMat dR;
  bool has_derivative = false;
};

AssembledSystem assemble(double x, const SpectralData& d, int N, bool derivative = false);

}  // namespace matspec
