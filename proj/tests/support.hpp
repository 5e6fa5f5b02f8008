#pragma once

#include <cmath>
#include <functional>

#include "matspec/matspec.hpp"

namespace fixtures {

using matspec::cd;
using matspec::CMat;

// Hermitian trigonometric polynomial with zero mean on (0, pi).
inline CMat trig_Q(double x) {
  CMat A(2, 2), B(2, 2), C(2, 2);
  A << 1.0, cd(0.3, 0.2), cd(0.3, -0.2), -0.5;
  B << 0.4, cd(0, -0.25), cd(0, 0.25), 0.2;
  C << 0.0, 0.3, 0.3, -0.3;
  return A * std::cos(x) + B * std::cos(2 * x) + C * std::sin(2 * x);
}

inline matspec::Coefficients trig_problem(int M) {
  matspec::Coefficients c = matspec::Coefficients::zero(2, M);
  c.Q = matspec::sample(M, trig_Q);
  return c;
}

inline matspec::Coefficients cos_problem(int M, double a = 1.0) {
  matspec::Coefficients c = matspec::Coefficients::zero(1, M);
  for (int i = 0; i <= M; ++i) c.Q[i](0, 0) = a * std::cos(c.x(i));
  return c;
}

// Example data whose band 1 has two distinct eigenvalues sharing e_1.
inline matspec::SpectralData fail_data(int N, double lambda12 = 0.25) {
  matspec::SpectralData d = matspec::model_data(2, N);
  d.bands[0].lambda = {0.0, lambda12};
  matspec::CVec e1(2);
  e1 << 1.0 / std::sqrt(matspec::kPi), 0.0;
  d.bands[0].v = {e1, e1};
  return d;
}

inline matspec::StarGraphProblem graph_cos2(int m, int M, double a) {
  matspec::StarGraphProblem g;
  g.m = m;
  g.M = M;
  g.q.assign(m, std::vector<double>(M + 1));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i <= M; ++i) g.q[j][i] = a * std::cos(2 * i * matspec::kPi / M);
  return g;
}

}  // namespace fixtures
