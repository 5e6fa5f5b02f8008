#pragma once

#include <memory>
#include <vector>

#include "matspec/direct.hpp"
#include "matspec/inverse.hpp"
#include "matspec/kernels.hpp"
#include "matspec/stability.hpp"
#include "matspec/types.hpp"

namespace matspec {

constexpr double kZeroMeanTol = 1e-8;

// Star graph with m edges of length pi, Dirichlet at the pendant vertices and
// standard matching at the centre. q[j] is sampled on x_i = i*pi/M.
struct StarGraphProblem {
  int m = 1;
  int M = 0;
  std::vector<std::vector<double>> q;

  double step() const { return kPi / M; }
  // diag{q_j} as a Coefficients record with h = H = 0.
  Coefficients matrix_form() const;
};

// T with all entries 1/m, and I - T.
CMat projector_T(int m);
CMat projector_Tperp(int m);

// Throws ValidationError unless the grid is usable and every q_j has zero mean.
void validate(const StarGraphProblem& g);

// Spectral data with the graph normalization: Y_n1 = (n-1/2) phi v_n1,
// Y_nk = n phi v_nk for k >= 2, where phi(0) = 0, phi'(0) = I.
struct GraphSpectralData {
  SpectralData data;

  int m() const { return data.m; }
  int N() const { return data.N(); }
  cd rho(IndexPair p) const { return data.rho(p); }
  const CVec& v(IndexPair p) const { return data.v(p); }
  // (n-1/2) for k = 1, n otherwise.
  static double scale(IndexPair p) { return p.k == 1 ? p.n - 0.5 : double(p.n); }
  // rho~_nk of the zero problem.
  static double model_rho(IndexPair p) { return scale(p); }
  CMat beta(IndexPair p) const;
};

GraphSpectralData graph_model_data(int m, int N);
PairData pair_data(const GraphSpectralData& d);

class GraphSolver {
 public:
  explicit GraphSolver(const StarGraphProblem& g, DirectOptions o = {});

  void end_values(cd lambda, CMat& phi, CMat& dphi) const;
  MatrixTrajectory trajectory(cd lambda) const;
  // T phi'(pi) - T^perp phi(pi)
  CMat boundary_matrix(cd lambda) const;
  std::vector<double> eigenvalues(int N) const;
  // Orthonormal eigenfunction factors u (Y = phi u), before graph rescaling.
  std::vector<CVec> eigen_factors(double lambda, int r) const;
  GraphSpectralData forward(int N) const;
  // M(lambda) = Phi'(0, lambda).
  CMat weyl(cd lambda) const;

  double size_bound() const { return bound_; }

 private:
  StarGraphProblem g_;
  DirectOptions o_;
  int m_;
  CMat T_, Tp_;
  std::shared_ptr<Propagator> prop_;
  double bound_ = 0;
};

GraphSpectralData graph_forward(const StarGraphProblem& g, int N, DirectOptions o = {});

// Main-equation system with m+2 column blocks per band: k <= m, then the
// columns for lambda~_n1 = (n-1/2)^2 and lambda~_n = n^2.
AssembledSystem graph_assemble(double x, const GraphSpectralData& d, int N,
                               bool derivative = false);

struct GraphReconstruction {
  std::vector<CMat> Q;     // full matrix potential on the grid, Hermitian part
  StarGraphProblem edges;  // q_j from the diagonal
  double offdiag_residual = 0;  // sum over j != k of ||Q_jk||_{L2}
  double herm_defect = 0;
  double max_cond = 0;
};

GraphReconstruction graph_reconstruct(const GraphSpectralData& d, const InverseOptions& o);

GraphSpectralData graph_complete_with_model_tail(const GraphSpectralData& partial, int N);

// Gram of chi_nk = v_nk sin(rho_nk x), or v_nk x when rho_nk = 0.
CMat graph_riesz_gram(const GraphSpectralData& d, int N);
double graph_riesz(const GraphSpectralData& d, int N);

// Per-edge Z_j for each j = 1..m.
std::vector<double> graph_Zj(const Partition& part, const GraphSpectralData& A,
                             const GraphSpectralData& B);

}  // namespace matspec
