#include "matspec/inverse.hpp"

#include <algorithm>
#include <cmath>

#include "matspec/core.hpp"
#include "matspec/parallel.hpp"

namespace matspec {

void validate(const InverseOptions& o) {
  if (o.N < 1) throw ValidationError("N must be >= 1");
  if (o.M < 8) throw ValidationError("M must be >= 8");
  if (!(o.cond_limit > 1)) throw ValidationError("cond_limit must exceed 1");
}

RowSolve solve_rows(const AssembledSystem& a, double cond_limit) {
  const Eigen::Index P = a.R.rows();
  CMat At = (CMat::Identity(P, P) + a.R).transpose();
  Eigen::PartialPivLU<CMat> lu(At);
  RowSolve r;
  double rc = lu.rcond();
  r.cond = rc > 0 ? 1.0 / rc : INFINITY;
  if (!(r.cond <= cond_limit)) throw IllConditioned(a.x, r.cond);
  r.psi = lu.solve(a.psi.transpose()).transpose();
  if (a.has_derivative) {
    CMat rhs = a.dpsi - r.psi * a.dR;
    r.dpsi = lu.solve(rhs.transpose()).transpose();
  }
  return r;
}

CMat PsiSolution::phi(int i, int n, int k, const SpectralData& d) const {
  if (k == m + 1) return block(i, n, m + 1);
  return block(i, n, m + 1) + (d.rho({n, k}) - double(n - 1)) * block(i, n, k);
}

PsiSolution solve_main_equation(const SpectralData& d, const InverseOptions& o) {
  validate(o);
  if (d.N() < o.N) throw ValidationError("spectral data has fewer than N bands");
  PsiSolution sol;
  sol.N = o.N;
  sol.m = d.m;
  sol.cols = d.m + 1;
  sol.x.resize(o.M + 1);
  sol.psi.resize(o.M + 1);
  sol.dpsi.resize(o.M + 1);
  sol.cond.resize(o.M + 1);
  parallel_for(o.M + 1, [&](std::size_t i) {
    double x = i * kPi / o.M;
    sol.x[i] = x;
    RowSolve r = solve_rows(assemble(x, d, o.N, true), o.cond_limit);
    sol.psi[i] = std::move(r.psi);
    sol.dpsi[i] = std::move(r.dpsi);
    sol.cond[i] = r.cond;
  });
  return sol;
}

E0Function compute_E0(const PsiSolution& sol, const SpectralData& d) {
  const int m = sol.m;
  const std::size_t nodes = sol.x.size();
  E0Function e;
  e.E0.resize(nodes);
  e.dE0.resize(nodes);
  parallel_for(nodes, [&](std::size_t i) {
    const double x = sol.x[i];
    CMat E = CMat::Zero(m, m), dE = CMat::Zero(m, m);
    for (int n = 1; n <= sol.N; ++n) {
      const double rt = n - 1;
      const double bt = (n == 1 ? 1.0 : 2.0) / kPi;
      CMat p0 = sol.block(i, n, m + 1), dp0 = sol.dblock(i, n, m + 1);
      for (int k = 1; k <= m; ++k) {
        cd r = d.rho({n, k});
        cd rh = r - rt;
        CMat ph = p0 + rh * sol.block(i, n, k);
        CMat dph = dp0 + rh * sol.dblock(i, n, k);
        CMat b = d.beta({n, k});
        // cos(rho x) is real for real lambda.
        double c = std::real(std::cos(r * x));
        double dc = std::real(-r * std::sin(r * x));
        E += ph * b * c;
        dE += dph * b * c + ph * b * dc;
      }
      double c = std::cos(rt * x), dc = -rt * std::sin(rt * x);
      E -= bt * c * p0;
      dE -= bt * (c * dp0 + dc * p0);
    }
    e.E0[i] = E;
    e.dE0[i] = dE;
  });
  return e;
}

Reconstruction reconstruct_report(const SpectralData& d, const InverseOptions& o) {
  PsiSolution sol = solve_main_equation(d, o);
  E0Function e = compute_E0(sol, d);
  Reconstruction r;
  Coefficients& c = r.c;
  c.m = d.m;
  c.M = o.M;
  c.Q.resize(o.M + 1);
  for (int i = 0; i <= o.M; ++i) c.Q[i] = -2.0 * e.dE0[i];
  c.h = -e.E0.front();
  c.H = e.E0.back();
  double defect = std::max(herm_defect(c.h), herm_defect(c.H));
  for (const auto& q : c.Q) defect = std::max(defect, herm_defect(q));
  r.herm_defect = defect;
  r.max_cond = *std::max_element(sol.cond.begin(), sol.cond.end());
  if (o.symmetrize) {
    for (auto& q : c.Q) q = herm_part(q);
    c.h = herm_part(c.h);
    c.H = herm_part(c.H);
  }
  return r;
}

Coefficients reconstruct(const SpectralData& d, const InverseOptions& o) {
  return reconstruct_report(d, o).c;
}

SpectralData complete_with_model_tail(const SpectralData& partial, int N) {
  SpectralData model = model_data(partial.m, N);
  SpectralData out = model;
  for (int n = 0; n < std::min(partial.N(), N); ++n) out.bands[n] = partial.bands[n];
  return out;
}

}  // namespace matspec
