#pragma once

#include <memory>
#include <vector>

#include "matspec/propagator.hpp"
#include "matspec/types.hpp"

namespace matspec {

struct MatrixTrajectory {
  std::vector<double> x;
  std::vector<CMat> phi;
  std::vector<CMat> dphi;
};

struct DirectOptions {
  int substeps = 1;
  double mesh = 0.1;
};

using WeightMatrices = std::vector<std::vector<CMat>>;  // [n-1][k-1]

// Forward solver bound to one coefficient triple.
class DirectSolver {
 public:
  explicit DirectSolver(const Coefficients& c, DirectOptions o = {});

  const Coefficients& coefficients() const { return c_; }

  MatrixTrajectory trajectory(cd lambda) const;
  void end_values(cd lambda, CMat& phi, CMat& dphi) const;
  CMat boundary_matrix(cd lambda) const;
  // Lowest N*m eigenvalues with multiplicity.
  std::vector<double> eigenvalues(int N) const;
  // r norming vectors for an eigenvalue of multiplicity r.
  std::vector<CVec> norming_vectors(double lambda, int r) const;
  SpectralData forward(int N) const;
  CMat weyl(cd lambda) const;

  // ||h|| + ||H|| + sqrt(pi) ||Q||_{L2}
  double size_bound() const { return bound_; }

 private:
  Coefficients c_;
  DirectOptions o_;
  std::shared_ptr<Propagator> prop_;
  double bound_ = 0;
};

MatrixTrajectory integrate_phi(const Coefficients& c, cd lambda, int substeps = 1);
CMat boundary_matrix(const Coefficients& c, cd lambda);
std::vector<double> find_eigenvalues(const Coefficients& c, int N);
std::vector<CVec> norming_vectors(const Coefficients& c, double lambda, int r);
SpectralData forward(const Coefficients& c, int N, DirectOptions o = {});
WeightMatrices weight_matrices(const SpectralData& d);
CMat weyl_matrix(const Coefficients& c, cd lambda);

// Groups of equal eigenvalues as [first, last) positions in IndexPair order.
std::vector<std::pair<int, int>> eigenvalue_groups(const std::vector<double>& lambda,
                                                   double rel_tol = 1e-11);

// Right-unitary normalization used for one-dimensional eigenspaces: the
// largest entry is made real positive.
void fix_phase(CVec& v);

// Kernel basis of Z and the Gram matrix of phi*w over (0, pi); shared with the
// graph solver. Throws RankMismatch.
CMat kernel_basis(const CMat& Z, int r, double lambda);
CMat inverse_sqrt(const CMat& G);

}  // namespace matspec
