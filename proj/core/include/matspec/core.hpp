#pragma once

#include <vector>

#include "matspec/types.hpp"

namespace matspec {

constexpr double kHermTol = 1e-10;
constexpr double kOmegaTol = 1e-8;

struct ValidationReport {
  double herm_defect = 0;  // max over Q(x_i), h, H
  double omega_norm = 0;
  bool grid_ok = false;
  bool hermitian = false;
  bool in_class_P = false;
  bool valid() const { return grid_ok && hermitian; }
};

ValidationReport validate_coefficients(const Coefficients& c);
// Throws ValidationError when the report is not valid.
void require_valid(const Coefficients& c);

struct ImpedanceForm {
  std::vector<CMat> sigma;
  CMat Hcheck;
};

ImpedanceForm to_impedance_form(const Coefficients& c);

struct BetaAggregates {
  std::vector<std::vector<CMat>> beta;  // [n-1][k-1]
  std::vector<CMat> V;
  std::vector<CMat> beta_n;
};

BetaAggregates beta_aggregates(const SpectralData& d);

// Spectral data of L(0,0,0): lambda=(n-1)^2, v_nk = sqrt(c_n) e_k.
SpectralData model_data(int m, int N);

// Composite trapezoid on the uniform grid.
CMat trapezoid(const std::vector<CMat>& f, double step);
double trapezoid(const std::vector<double>& f, double step);
std::vector<CMat> cumulative_trapezoid(const std::vector<CMat>& f, double step);

// Entrywise L2 norm sum_{jk} ||a_jk||_{L2}.
double l2_norm(const std::vector<CMat>& f, double step);
double l2_norm(const std::vector<double>& f, double step);

// Q(x) sampled on the grid from a callable.
template <class F>
std::vector<CMat> sample(int M, F&& f) {
  std::vector<CMat> out(M + 1);
  for (int i = 0; i <= M; ++i) out[i] = f(i * kPi / M);
  return out;
}

}  // namespace matspec
