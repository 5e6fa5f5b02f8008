#include "matspec/core.hpp"

#include <cmath>

namespace matspec {

cd rho_of(double lambda) {
  if (lambda >= 0) return {std::sqrt(lambda), 0.0};
  return {0.0, std::sqrt(-lambda)};
}

double opnorm(const CMat& a) {
  if (a.size() == 0) return 0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

CMat herm_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double herm_defect(const CMat& a) { return opnorm(a - a.adjoint()); }

CMat Coefficients::omega() const {
  return h + H + 0.5 * trapezoid(Q, step());
}

Coefficients Coefficients::zero(int m, int M) {
  Coefficients c;
  c.m = m;
  c.M = M;
  c.Q.assign(M + 1, CMat::Zero(m, m));
  c.h = CMat::Zero(m, m);
  c.H = CMat::Zero(m, m);
  return c;
}

cd SpectralData::rho(IndexPair p) const { return rho_of(lambda(p)); }

CMat SpectralData::beta(IndexPair p) const {
  const CVec& u = v(p);
  return u * u.adjoint();
}

CMat SpectralData::V(int n) const {
  CMat out(m, m);
  for (int k = 0; k < m; ++k) out.col(k) = bands[n - 1].v[k];
  return out;
}

CMat SpectralData::beta_sum(int n) const {
  CMat Vn = V(n);
  return Vn * Vn.adjoint();
}

ValidationReport validate_coefficients(const Coefficients& c) {
  ValidationReport r;
  r.grid_ok = c.m >= 1 && c.M >= 3 && static_cast<int>(c.Q.size()) == c.M + 1 &&
              c.h.rows() == c.m && c.h.cols() == c.m && c.H.rows() == c.m &&
              c.H.cols() == c.m;
  for (const auto& q : c.Q)
    if (q.rows() != c.m || q.cols() != c.m) r.grid_ok = false;
  if (!r.grid_ok) return r;
  double d = std::max(herm_defect(c.h), herm_defect(c.H));
  for (const auto& q : c.Q) d = std::max(d, herm_defect(q));
  r.herm_defect = d;
  r.hermitian = d <= kHermTol;
  r.omega_norm = opnorm(c.omega());
  r.in_class_P = r.hermitian && r.omega_norm <= kOmegaTol;
  return r;
}

void require_valid(const Coefficients& c) {
  auto r = validate_coefficients(c);
  if (!r.grid_ok) throw ValidationError("coefficient shapes do not match m and M (M >= 3)");
  if (!r.hermitian)
    throw ValidationError("coefficients are not Hermitian (defect " +
                          std::to_string(r.herm_defect) + ")");
}

CMat trapezoid(const std::vector<CMat>& f, double step) {
  CMat s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * step;
}

double trapezoid(const std::vector<double>& f, double step) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * step;
}

std::vector<CMat> cumulative_trapezoid(const std::vector<CMat>& f, double step) {
  std::vector<CMat> out(f.size());
  out[0] = CMat::Zero(f[0].rows(), f[0].cols());
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * step * (f[i - 1] + f[i]);
  return out;
}

double l2_norm(const std::vector<CMat>& f, double step) {
  if (f.empty()) return 0;
  const auto rows = f[0].rows(), cols = f[0].cols();
  double total = 0;
  std::vector<double> sq(f.size());
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index k = 0; k < cols; ++k) {
      for (std::size_t i = 0; i < f.size(); ++i) sq[i] = std::norm(f[i](j, k));
      total += std::sqrt(trapezoid(sq, step));
    }
  return total;
}

double l2_norm(const std::vector<double>& f, double step) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return std::sqrt(trapezoid(sq, step));
}

ImpedanceForm to_impedance_form(const Coefficients& c) {
  ImpedanceForm out;
  out.sigma = cumulative_trapezoid(c.Q, c.step());
  for (auto& s : out.sigma) s += c.h;
  out.Hcheck = c.H + out.sigma.back();
  return out;
}

BetaAggregates beta_aggregates(const SpectralData& d) {
  BetaAggregates a;
  for (int n = 1; n <= d.N(); ++n) {
    std::vector<CMat> row;
    for (int k = 1; k <= d.m; ++k) row.push_back(d.beta({n, k}));
    a.beta.push_back(std::move(row));
    a.V.push_back(d.V(n));
    a.beta_n.push_back(a.V.back() * a.V.back().adjoint());
  }
  return a;
}

SpectralData model_data(int m, int N) {
  SpectralData d;
  d.m = m;
  for (int n = 1; n <= N; ++n) {
    Band b;
    b.n = n;
    const double c = std::sqrt((n == 1 ? 1.0 : 2.0) / kPi);
    for (int k = 0; k < m; ++k) {
      b.lambda.push_back(double(n - 1) * (n - 1));
      CVec e = CVec::Zero(m);
      e(k) = c;
      b.v.push_back(e);
    }
    d.bands.push_back(std::move(b));
  }
  return d;
}

}  // namespace matspec
