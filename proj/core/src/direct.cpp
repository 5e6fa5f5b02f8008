#include "matspec/direct.hpp"

#include <algorithm>
#include <cmath>

#include "matspec/core.hpp"
#include "matspec/parallel.hpp"
#include "matspec/phase_scan.hpp"

namespace matspec {

DirectSolver::DirectSolver(const Coefficients& c, DirectOptions o) : c_(c), o_(o) {
  require_valid(c_);
  prop_ = std::make_shared<Propagator>(c_.Q, o_.substeps);
  std::vector<double> qn(c_.M + 1);
  for (int i = 0; i <= c_.M; ++i) qn[i] = opnorm(c_.Q[i]);
  bound_ = opnorm(c_.h) + opnorm(c_.H) + std::sqrt(kPi) * l2_norm(qn, c_.step());
}

MatrixTrajectory DirectSolver::trajectory(cd lambda) const {
  MatrixTrajectory t;
  CMat y = CMat::Identity(c_.m, c_.m), yp = c_.h;
  prop_->run(lambda, y, yp, &t.phi, &t.dphi);
  for (int i = 0; i <= c_.M; ++i) t.x.push_back(c_.x(i));
  return t;
}

void DirectSolver::end_values(cd lambda, CMat& phi, CMat& dphi) const {
  phi = CMat::Identity(c_.m, c_.m);
  dphi = c_.h;
  prop_->run(lambda, phi, dphi);
}

CMat DirectSolver::boundary_matrix(cd lambda) const {
  CMat phi, dphi;
  end_values(lambda, phi, dphi);
  return dphi + c_.H * phi;
}

std::vector<double> DirectSolver::eigenvalues(int N) const {
  const int m = c_.m;
  Pencil pencil = [this](double lam, double c, CMat& Y, CMat& Z) {
    CMat phi, dphi;
    end_values(lam, phi, dphi);
    Y = c * phi;
    Z = dphi + c_.H * phi;
  };
  ScanOptions so;
  so.ds = o_.mesh;
  so.s_low = -(bound_ + 1);
  so.s_stop = N - 0.5;
  so.s_cap = N + 2 * bound_ + 5;
  so.target = static_cast<std::size_t>(N) * m;
  // Planes along x for the oscillation count, with enough substeps that the
  // phase turns by at most about 1/2 per step up to s_cap.
  double qmax = 0;
  for (const auto& q : c_.Q) qmax = std::max(qmax, opnorm(q));
  const double rate = 4 * so.s_cap + 2 * qmax + 2 * (opnorm(c_.h) + opnorm(c_.H)) + 4;
  const int sub = std::max(o_.substeps, static_cast<int>(std::ceil(rate * c_.step() / 0.5)));
  Propagator fine(c_.Q, sub);
  PathPencil path = [&](double lam, const PlaneVisit& visit) {
    const double c = std::max(1.0, std::abs(rho_of(lam)));
    CMat y = CMat::Identity(c_.m, c_.m), yp = c_.h;
    Propagator::Visit v = [&](const CMat& p, const CMat& dp) { visit(c * p, dp + c_.H * p); };
    fine.run(lam, y, yp, nullptr, nullptr, &v);
  };
  ScanResult r = scan_eigenvalues(pencil, so, path);

  // Asymptotic windows only hold once rho is well past the potential's size.
  for (int n = 1; n <= N; ++n) {
    if (n - 1 < 2 * (bound_ + 1)) continue;
    int inside = 0;
    for (double lam : r.lambda) {
      double s = lambda_to_s(lam);
      if (s >= n - 1.5 && s < n - 0.5) ++inside;
    }
    bool ok = inside == m;
    for (int k = 0; k < m && ok; ++k) {
      double s = lambda_to_s(r.lambda[(n - 1) * m + k]);
      ok = s >= n - 1.5 && s < n - 0.5;
    }
    if (!ok)
      throw BandIncomplete("band " + std::to_string(n) + " has " + std::to_string(inside) +
                           " eigenvalues in its window, expected " + std::to_string(m));
  }
  r.lambda.resize(static_cast<std::size_t>(N) * m);
  return r.lambda;
}

CMat kernel_basis(const CMat& Z, int r, double lambda) {
  const int m = static_cast<int>(Z.rows());
  Eigen::JacobiSVD<CMat> svd(Z, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = 1 + std::abs(lambda);
  if (sv(m - r) > 1e-6 * scale)
    throw RankMismatch("kernel smaller than multiplicity " + std::to_string(r) +
                       " at lambda=" + std::to_string(lambda));
  if (r < m && sv(m - r - 1) < 1e-10 * scale)
    throw RankMismatch("kernel larger than multiplicity " + std::to_string(r) +
                       " at lambda=" + std::to_string(lambda));
  return svd.matrixV().rightCols(r);
}

CMat inverse_sqrt(const CMat& G) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(G));
  return es.operatorInverseSqrt();
}

void fix_phase(CVec& v) {
  Eigen::Index j = 0;
  v.cwiseAbs().maxCoeff(&j);
  if (std::abs(v(j)) > 0) v *= std::conj(v(j)) / std::abs(v(j));
}

std::vector<CVec> DirectSolver::norming_vectors(double lambda, int r) const {
  CMat phi, dphi;
  end_values(lambda, phi, dphi);
  CMat W = kernel_basis(dphi + c_.H * phi, r, lambda);
  // int phi* phi = phi'* phi_lambda - phi* phi'_lambda at x = pi.
  const double d = 1e-3 * std::max(1.0, std::abs(rho_of(lambda)));
  const double off[4] = {-2 * d, -d, d, 2 * d};
  const double wt[4] = {1, -8, 8, -1};
  CMat pl = CMat::Zero(c_.m, c_.m), dpl = CMat::Zero(c_.m, c_.m);
  for (int i = 0; i < 4; ++i) {
    CMat p, dp;
    end_values(lambda + off[i], p, dp);
    pl += wt[i] * p;
    dpl += wt[i] * dp;
  }
  pl /= 12 * d;
  dpl /= 12 * d;
  CMat G = W.adjoint() * (dphi.adjoint() * pl - phi.adjoint() * dpl) * W;
  CMat Vm = W * inverse_sqrt(G);
  std::vector<CVec> out;
  for (int j = 0; j < r; ++j) {
    CVec v = Vm.col(j);
    if (r == 1) fix_phase(v);
    out.push_back(v);
  }
  return out;
}

std::vector<std::pair<int, int>> eigenvalue_groups(const std::vector<double>& lambda,
                                                   double rel_tol) {
  std::vector<std::pair<int, int>> g;
  int n = static_cast<int>(lambda.size());
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && std::abs(lambda[j] - lambda[i]) <= rel_tol * (1 + std::abs(lambda[i]))) ++j;
    g.emplace_back(i, j);
    i = j;
  }
  return g;
}

SpectralData DirectSolver::forward(int N) const {
  const int m = c_.m;
  std::vector<double> lam = eigenvalues(N);
  auto groups = eigenvalue_groups(lam);
  std::vector<std::vector<CVec>> vecs(groups.size());
  parallel_for(groups.size(), [&](std::size_t g) {
    auto [a, b] = groups[g];
    double mean = 0;
    for (int i = a; i < b; ++i) mean += lam[i];
    vecs[g] = norming_vectors(mean / (b - a), b - a);
  });
  SpectralData d;
  d.m = m;
  d.bands.resize(N);
  for (int n = 0; n < N; ++n) {
    d.bands[n].n = n + 1;
    d.bands[n].lambda.assign(lam.begin() + n * m, lam.begin() + (n + 1) * m);
    d.bands[n].v.resize(m);
  }
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i = groups[g].first; i < groups[g].second; ++i)
      d.bands[i / m].v[i % m] = vecs[g][i - groups[g].first];
  return d;
}

CMat DirectSolver::weyl(cd lambda) const {
  const int m = c_.m;
  CMat y(m, 2 * m), yp(m, 2 * m);
  y << CMat::Identity(m, m), CMat::Zero(m, m);
  yp << c_.h, CMat::Identity(m, m);
  prop_->run(lambda, y, yp);
  CMat Z = yp.leftCols(m) + c_.H * y.leftCols(m);
  CMat B = yp.rightCols(m) + c_.H * y.rightCols(m);
  // Condition relative to the size of (phi, phi') at pi, so that it also means
  // something for m = 1.
  const double c = std::max(1.0, std::abs(std::sqrt(lambda)));
  const double size = opnorm(yp.leftCols(m)) + c * opnorm(y.leftCols(m));
  Eigen::JacobiSVD<CMat> svd(Z);
  const double smin = svd.singularValues()(m - 1);
  if (smin == 0 || size / smin > 1e12)
    throw NearEigenvalue("boundary matrix is singular to working precision");
  return -Z.partialPivLu().solve(B);
}

MatrixTrajectory integrate_phi(const Coefficients& c, cd lambda, int substeps) {
  return DirectSolver(c, {substeps}).trajectory(lambda);
}

CMat boundary_matrix(const Coefficients& c, cd lambda) {
  return DirectSolver(c).boundary_matrix(lambda);
}

std::vector<double> find_eigenvalues(const Coefficients& c, int N) {
  return DirectSolver(c).eigenvalues(N);
}

std::vector<CVec> norming_vectors(const Coefficients& c, double lambda, int r) {
  return DirectSolver(c).norming_vectors(lambda, r);
}

SpectralData forward(const Coefficients& c, int N, DirectOptions o) {
  return DirectSolver(c, o).forward(N);
}

WeightMatrices weight_matrices(const SpectralData& d) {
  std::vector<double> lam;
  for (const auto& b : d.bands) lam.insert(lam.end(), b.lambda.begin(), b.lambda.end());
  WeightMatrices w(d.N(), std::vector<CMat>(d.m));
  for (auto [a, b] : eigenvalue_groups(lam)) {
    CMat alpha = CMat::Zero(d.m, d.m);
    for (int i = a; i < b; ++i) {
      const CVec& v = d.bands[i / d.m].v[i % d.m];
      alpha += v * v.adjoint();
    }
    for (int i = a; i < b; ++i) w[i / d.m][i % d.m] = alpha;
  }
  return w;
}

CMat weyl_matrix(const Coefficients& c, cd lambda) { return DirectSolver(c).weyl(lambda); }

}  // namespace matspec
