#pragma once

#include <functional>
#include <vector>

#include "matspec/types.hpp"

namespace matspec {

// Fourth-order commutator-free Magnus integrator for -y'' + Q(x) y = lambda y
// on the uniform grid of Q. Each exponential factor is evaluated exactly through
// an eigendecomposition of the averaged potential, which is independent of
// lambda and therefore precomputed once.
class Propagator {
 public:
  explicit Propagator(const std::vector<CMat>& Q, int substeps = 1);

  int m() const { return m_; }
  int M() const { return M_; }

  // Advances (y, y') from x=0 to x=pi in place. y and yp are m x p.
  // When ys/yps are given they receive the values at every grid node. visit,
  // when given, sees the start and the state after every substep.
  using Visit = std::function<void(const CMat& y, const CMat& yp)>;
  void run(cd lambda, CMat& y, CMat& yp, std::vector<CMat>* ys = nullptr,
           std::vector<CMat>* yps = nullptr, const Visit* visit = nullptr) const;

 private:
  struct Factor {
    CMat U;
    Eigen::VectorXd p;
    bool diagonal = false;
  };
  int m_ = 1;
  int M_ = 0;
  int sub_ = 1;
  double hs_ = 0;
  std::vector<Factor> factors_;  // two per substep
};

}  // namespace matspec
