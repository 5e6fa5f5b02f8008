#pragma once

#include <map>
#include <vector>

#include "matspec/types.hpp"

namespace matspec {

// rho = base + hat and beta per index pair. base is the model value, so
// differences of nearby rho keep the digits of hat. beta already carries any
// problem-specific scaling (graph data uses (n-1/2)^2 v v* and n^2 v v*).
struct PairEntry {
  cd base;
  cd hat;
  CMat beta;
  cd rho() const { return base + hat; }
};
using PairData = std::map<IndexPair, PairEntry>;

PairData pair_data(const SpectralData& d);

struct Partition {
  std::vector<std::vector<IndexPair>> groups;
  // Optional: refinement[s] splits groups[s] into disjoint subgroups.
  std::vector<std::vector<std::vector<IndexPair>>> refinement;

  bool refined() const { return !refinement.empty(); }
};

// Checks disjointness and that the union is {(n,k): n <= N}. Throws
// ValidationError.
void check_partition(const Partition& p, int N, int m);

// J_s = {(s,k)}: one group per band.
Partition band_partition(int N, int m);
// One group per index pair, in IndexPair order.
Partition singleton_partition(int N, int m);
// J_si = {(s,k): omega_k = varsigma_i} inside the band partition.
Partition canonical_refinement(int N, const Eigen::VectorXd& omega);

struct RemainderNorms {
  double kappa_norm = 0;
  double K_norm = 0;
  std::vector<double> kappa;  // |kappa_nk| in IndexPair order
  std::vector<double> K;      // ||K_n||
  // For omega != 0: ||K_{n<k>}|| for each distinct omega value, per band.
  std::vector<std::vector<double>> K_groups;
  double K_groups_norm = 0;
};

// kappa_nk = n (rho_nk - (n-1) - omega_k/(pi n)); K_n = n (V_n* V_n - c_n I)
// with c_1 = 1/pi and c_n = 2/pi, the model values. An empty omega means 0.
RemainderNorms remainder_norms(const SpectralData& d, const Eigen::VectorXd& omega = {});

// Gram matrix of {v_nk cos(rho_nk x)}, n <= N.
CMat riesz_gram(const SpectralData& d, int N);
// sqrt of the smallest Gram eigenvalue.
double riesz_lower_bound(const SpectralData& d, int N);

struct StabilityReport {
  RemainderNorms remainders;
  double eps_hat = 0;
  std::vector<double> xi;
  double Omega = 0;
  double eps = 0;
  bool member = false;
  // eps_hat is computed from a finite Gram section; it is a surrogate for the
  // Riesz lower bound, not a bound.
  int gram_bands = 0;
};

StabilityReport membership(const SpectralData& d, double Omega, double eps,
                           const Eigen::VectorXd& omega = {});

struct ZetaResult {
  std::vector<double> zeta;  // per group
  double Z = 0;
};

ZetaResult zeta_Z(const Partition& part, const PairData& A, const PairData& B);
ZetaResult zeta_Z(const Partition& part, const SpectralData& A, const SpectralData& B);

// Per-diagonal-entry variant: zeta_sj uses |beta_jj(J_s) - beta~_jj(J_s)|.
ZetaResult zeta_Zj(const Partition& part, const PairData& A, const PairData& B, int j);

ZetaResult theta_Theta(const Partition& part, const PairData& A, const PairData& B);
ZetaResult theta_Theta(const Partition& part, const SpectralData& A, const SpectralData& B);

// Greedy clustering of the union of rho values of A and B. Index pairs of A and
// B with the same label share a node; a new cluster starts where consecutive
// values differ by more than gap/n.
Partition auto_partition(const PairData& A, const PairData& B, double gap);
Partition auto_partition(const SpectralData& A, const SpectralData& B, double gap);

struct RatioResult {
  double numerator = 0;  // ||Q^||_{L2} + ||h^|| + ||H^||
  double Z = 0;
  double ratio = 0;
  int groups = 0;
};

// Forward-solves both problems with N bands. An empty partition means
// auto_partition(gap = 0.5).
RatioResult stability_ratio(const Coefficients& a, const Coefficients& b, int N,
                            const Partition& part = {});

}  // namespace matspec
