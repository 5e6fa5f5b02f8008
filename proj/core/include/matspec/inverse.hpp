#pragma once

#include <vector>

#include "matspec/kernels.hpp"
#include "matspec/types.hpp"

namespace matspec {

struct InverseOptions {
  int N = 25;
  int M = 200;
  double cond_limit = 1e12;
  bool symmetrize = true;
};

void validate(const InverseOptions& o);

struct PsiSolution {
  int N = 0;
  int m = 1;
  int cols = 0;
  std::vector<double> x;
  std::vector<CMat> psi;   // per node, m x (N cols m)
  std::vector<CMat> dpsi;
  std::vector<double> cond;

  CMat block(int i, int n, int k) const {
    return psi[i].block(0, ((n - 1) * cols + (k - 1)) * m, m, m);
  }
  CMat dblock(int i, int n, int k) const {
    return dpsi[i].block(0, ((n - 1) * cols + (k - 1)) * m, m, m);
  }
  // phi(x_i, lambda_nk) for k <= m and phi(x_i, lambda~_n) for k = m+1.
  CMat phi(int i, int n, int k, const SpectralData& d) const;
};

PsiSolution solve_main_equation(const SpectralData& d, const InverseOptions& o);

struct E0Function {
  std::vector<CMat> E0;
  std::vector<CMat> dE0;
};

E0Function compute_E0(const PsiSolution& sol, const SpectralData& d);

struct Reconstruction {
  Coefficients c;
  double herm_defect = 0;  // of the raw output, before symmetrization
  double max_cond = 0;
};

Reconstruction reconstruct_report(const SpectralData& d, const InverseOptions& o);
Coefficients reconstruct(const SpectralData& d, const InverseOptions& o);

SpectralData complete_with_model_tail(const SpectralData& partial, int N);

// Solves psi A = rhs rows through a factorization of A^T; shared with the graph.
struct RowSolve {
  CMat psi;
  CMat dpsi;
  double cond = 0;
};
RowSolve solve_rows(const AssembledSystem& a, double cond_limit);

}  // namespace matspec
