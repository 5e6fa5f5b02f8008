#include "matspec/graph.hpp"

#include <algorithm>
#include <cmath>

#include "matspec/core.hpp"
#include "matspec/direct.hpp"
#include "matspec/parallel.hpp"
#include "matspec/phase_scan.hpp"

namespace matspec {

Coefficients StarGraphProblem::matrix_form() const {
  Coefficients c = Coefficients::zero(m, M);
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j < m; ++j) c.Q[i](j, j) = q[j][i];
  return c;
}

CMat projector_T(int m) { return CMat::Constant(m, m, cd(1.0 / m, 0)); }
CMat projector_Tperp(int m) { return CMat::Identity(m, m) - projector_T(m); }

void validate(const StarGraphProblem& g) {
  if (g.m < 1) throw ValidationError("graph needs at least one edge");
  if (g.M < 3) throw ValidationError("grid needs M >= 3");
  if (static_cast<int>(g.q.size()) != g.m) throw ValidationError("expected one potential per edge");
  for (int j = 0; j < g.m; ++j) {
    if (static_cast<int>(g.q[j].size()) != g.M + 1)
      throw ValidationError("edge " + std::to_string(j + 1) + " has wrong sample count");
    for (double v : g.q[j])
      if (!std::isfinite(v)) throw ValidationError("non-finite potential value");
    double mean = trapezoid(g.q[j], g.step());
    if (std::abs(mean) > kZeroMeanTol)
      throw ValidationError("edge " + std::to_string(j + 1) + " potential has integral " +
                            std::to_string(mean));
  }
}

CMat GraphSpectralData::beta(IndexPair p) const {
  const double s = scale(p);
  return s * s * data.beta(p);
}

namespace {

// Orthonormal basis of range(T^perp): Helmert contrasts.
CVec helmert(int m, int k) {
  CVec u = CVec::Zero(m);
  const double c = 1.0 / std::sqrt(double(k - 1) * k);
  for (int i = 0; i < k - 1; ++i) u(i) = c;
  u(k - 1) = -(k - 1) * c;
  return u;
}

}  // namespace

GraphSpectralData graph_model_data(int m, int N) {
  GraphSpectralData d;
  d.data.m = m;
  const double c = std::sqrt(2.0 / kPi);
  for (int n = 1; n <= N; ++n) {
    Band b;
    b.n = n;
    b.lambda.push_back((n - 0.5) * (n - 0.5));
    b.v.push_back(CVec::Constant(m, cd(c / std::sqrt(double(m)), 0)));
    for (int k = 2; k <= m; ++k) {
      b.lambda.push_back(double(n) * n);
      b.v.push_back(c * helmert(m, k));
    }
    d.data.bands.push_back(std::move(b));
  }
  return d;
}

PairData pair_data(const GraphSpectralData& d) {
  PairData out;
  for (int n = 1; n <= d.N(); ++n)
    for (int k = 1; k <= d.m(); ++k) {
      const double base = GraphSpectralData::model_rho({n, k});
      out[{n, k}] = {base, d.rho({n, k}) - base, d.beta({n, k})};
    }
  return out;
}

GraphSolver::GraphSolver(const StarGraphProblem& g, DirectOptions o) : g_(g), o_(o), m_(g.m) {
  validate(g_);
  Coefficients c = g_.matrix_form();
  T_ = projector_T(m_);
  Tp_ = projector_Tperp(m_);
  prop_ = std::make_shared<Propagator>(c.Q, o_.substeps);
  std::vector<double> qn(g_.M + 1);
  for (int i = 0; i <= g_.M; ++i) qn[i] = opnorm(c.Q[i]);
  bound_ = std::sqrt(kPi) * l2_norm(qn, g_.step());
}

void GraphSolver::end_values(cd lambda, CMat& phi, CMat& dphi) const {
  phi = CMat::Zero(m_, m_);
  dphi = CMat::Identity(m_, m_);
  prop_->run(lambda, phi, dphi);
}

MatrixTrajectory GraphSolver::trajectory(cd lambda) const {
  MatrixTrajectory t;
  CMat y = CMat::Zero(m_, m_), yp = CMat::Identity(m_, m_);
  prop_->run(lambda, y, yp, &t.phi, &t.dphi);
  for (int i = 0; i <= g_.M; ++i) t.x.push_back(i * g_.step());
  return t;
}

CMat GraphSolver::boundary_matrix(cd lambda) const {
  CMat phi, dphi;
  end_values(lambda, phi, dphi);
  return T_ * dphi - Tp_ * phi;
}

std::vector<double> GraphSolver::eigenvalues(int N) const {
  const int m = m_;
  Pencil pencil = [this](double lam, double c, CMat& Y, CMat& Z) {
    CMat phi, dphi;
    end_values(lam, phi, dphi);
    Y = c * (T_ * phi) + Tp_ * dphi;
    Z = T_ * dphi - c * (Tp_ * phi);
  };
  ScanOptions so;
  so.ds = o_.mesh;
  so.s_low = -(bound_ + 1);
  so.s_stop = N + 0.45;
  so.s_cap = N + 2 * bound_ + 5;
  so.target = static_cast<std::size_t>(N) * m;
  double qmax = 0;
  for (const auto& q : g_.q)
    for (double v : q) qmax = std::max(qmax, std::abs(v));
  const double rate = 4 * so.s_cap + 2 * qmax + 4;
  const int sub = std::max(o_.substeps, static_cast<int>(std::ceil(rate * g_.step() / 0.5)));
  Propagator fine(g_.matrix_form().Q, sub);
  PathPencil path = [&](double lam, const PlaneVisit& visit) {
    const double c = std::max(1.0, std::abs(rho_of(lam)));
    CMat y = CMat::Zero(m_, m_), yp = CMat::Identity(m_, m_);
    Propagator::Visit v = [&](const CMat& p, const CMat& dp) {
      visit(c * (T_ * p) + Tp_ * dp, T_ * dp - c * (Tp_ * p));
    };
    fine.run(lam, y, yp, nullptr, nullptr, &v);
  };
  ScanResult r = scan_eigenvalues(pencil, so, path);

  auto count = [&](double a, double b) {
    int c = 0;
    for (double lam : r.lambda) {
      double s = lambda_to_s(lam);
      if (s >= a && s < b) ++c;
    }
    return c;
  };
  for (int n = 1; n <= N; ++n) {
    if (n - 1 < 2 * (bound_ + 1)) continue;
    int a = count(n - 0.9, n - 0.1), b = count(n - 0.1, n + 0.4);
    if (a != 1 || b != m - 1)
      throw BandIncomplete("band " + std::to_string(n) + " has " + std::to_string(a) + "+" +
                           std::to_string(b) + " eigenvalues in its windows, expected 1+" +
                           std::to_string(m - 1));
  }
  r.lambda.resize(static_cast<std::size_t>(N) * m);
  return r.lambda;
}

std::vector<CVec> GraphSolver::eigen_factors(double lambda, int r) const {
  CMat phi, dphi;
  end_values(lambda, phi, dphi);
  CMat W = kernel_basis(T_ * dphi - Tp_ * phi, r, lambda);
  // With phi(0) = 0: int phi* phi = phi'* phi_lambda - phi* phi'_lambda at x = pi.
  const double d = 1e-3 * std::max(1.0, std::abs(rho_of(lambda)));
  const double off[4] = {-2 * d, -d, d, 2 * d};
  const double wt[4] = {1, -8, 8, -1};
  CMat pl = CMat::Zero(m_, m_), dpl = CMat::Zero(m_, m_);
  for (int i = 0; i < 4; ++i) {
    CMat p, dp;
    end_values(lambda + off[i], p, dp);
    pl += wt[i] * p;
    dpl += wt[i] * dp;
  }
  pl /= 12 * d;
  dpl /= 12 * d;
  CMat G = W.adjoint() * (dphi.adjoint() * pl - phi.adjoint() * dpl) * W;
  CMat U = W * inverse_sqrt(G);
  std::vector<CVec> out;
  for (int j = 0; j < r; ++j) {
    CVec u = U.col(j);
    if (r == 1) fix_phase(u);
    out.push_back(u);
  }
  return out;
}

GraphSpectralData GraphSolver::forward(int N) const {
  const int m = m_;
  std::vector<double> lam = eigenvalues(N);
  auto groups = eigenvalue_groups(lam);
  std::vector<std::vector<CVec>> vecs(groups.size());
  parallel_for(groups.size(), [&](std::size_t g) {
    auto [a, b] = groups[g];
    double mean = 0;
    for (int i = a; i < b; ++i) mean += lam[i];
    vecs[g] = eigen_factors(mean / (b - a), b - a);
  });
  GraphSpectralData d;
  d.data.m = m;
  d.data.bands.resize(N);
  for (int n = 0; n < N; ++n) {
    d.data.bands[n].n = n + 1;
    d.data.bands[n].lambda.assign(lam.begin() + n * m, lam.begin() + (n + 1) * m);
    d.data.bands[n].v.resize(m);
  }
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i = groups[g].first; i < groups[g].second; ++i) {
      IndexPair p{i / m + 1, i % m + 1};
      d.data.bands[i / m].v[i % m] = vecs[g][i - groups[g].first] / GraphSpectralData::scale(p);
    }
  return d;
}

CMat GraphSolver::weyl(cd lambda) const {
  const int m = m_;
  CMat y(m, 2 * m), yp(m, 2 * m);
  y << CMat::Zero(m, m), CMat::Identity(m, m);
  yp << CMat::Identity(m, m), CMat::Zero(m, m);
  prop_->run(lambda, y, yp);
  CMat B = T_ * yp.leftCols(m) - Tp_ * y.leftCols(m);
  CMat A = T_ * yp.rightCols(m) - Tp_ * y.rightCols(m);
  const double c = std::max(1.0, std::abs(std::sqrt(lambda)));
  const double size = opnorm(yp.leftCols(m)) + c * opnorm(y.leftCols(m));
  Eigen::JacobiSVD<CMat> svd(B);
  const double smin = svd.singularValues()(m - 1);
  if (smin == 0 || size / smin > 1e12)
    throw NearEigenvalue("boundary matrix is singular to working precision");
  return -B.partialPivLu().solve(A);
}

GraphSpectralData graph_forward(const StarGraphProblem& g, int N, DirectOptions o) {
  return GraphSolver(g, o).forward(N);
}

AssembledSystem graph_assemble(double x, const GraphSpectralData& d, int N, bool derivative) {
  const int m = d.m();
  const int C = m + 2;
  AssembledSystem a;
  a.x = x;
  a.N = N;
  a.m = m;
  a.cols = C;
  a.has_derivative = derivative;
  const int P = N * C * m;
  a.psi = CMat::Zero(m, P);
  a.R = CMat::Zero(P, P);
  if (derivative) {
    a.dpsi = CMat::Zero(m, P);
    a.dR = CMat::Zero(P, P);
  }
  const CMat Im = CMat::Identity(m, m);
  const CMat T = projector_T(m), Tp = projector_Tperp(m);
  std::vector<cd> rho(N * m);
  std::vector<CMat> beta(N * m);
  for (int n = 1; n <= N; ++n)
    for (int k = 1; k <= m; ++k) {
      rho[(n - 1) * m + k - 1] = d.rho({n, k});
      beta[(n - 1) * m + k - 1] = d.beta({n, k});
    }
  auto col = [&](int n, int k) { return ((n - 1) * C + (k - 1)) * m; };
  auto rt_of = [](int n, int k) { return k == 1 ? n - 0.5 : double(n); };

  for (int n = 1; n <= N; ++n) {
    for (int k = 1; k <= m; ++k) {
      cd r = rho[(n - 1) * m + k - 1];
      const double rt = rt_of(n, k);
      a.psi.block(0, col(n, k), m, m) = double(n) * sin_wtilde(x, r, rt) * Im;
      if (derivative) a.dpsi.block(0, col(n, k), m, m) = double(n) * sin_wtilde_dx(x, r, rt) * Im;
    }
    for (int j = 0; j < 2; ++j) {
      const double rt = j == 0 ? n - 0.5 : double(n);
      a.psi.block(0, col(n, m + 1 + j), m, m) = double(n) * sin_over(x, rt) * Im;
      if (derivative) a.dpsi.block(0, col(n, m + 1 + j), m, m) = double(n) * std::cos(rt * x) * Im;
    }
  }

  auto kernel = [&](cd theta, int n, int k, bool dx) -> cd {
    if (k <= m) {
      cd r = rho[(n - 1) * m + k - 1];
      const double rt = rt_of(n, k);
      return dx ? sin_Wtilde_dx(x, theta, r, rt) : sin_Wtilde(x, theta, r, rt);
    }
    const double rt = k == m + 1 ? n - 0.5 : double(n);
    return dx ? sin_product_integral_dx(x, theta, rt) : sin_product_integral(x, theta, rt);
  };

  for (int l = 1; l <= N; ++l) {
    const CMat bt1 = (2.0 / kPi) * (l - 0.5) * (l - 0.5) * T;
    const CMat bt = (2.0 / kPi) * double(l) * l * Tp;
    for (int n = 1; n <= N; ++n) {
      const double f = double(n) / l;
      for (int k = 1; k <= C; ++k) {
        for (int pass = 0; pass < (derivative ? 2 : 1); ++pass) {
          CMat& R = pass == 0 ? a.R : a.dR;
          const bool dx = pass == 1;
          CMat first = -kernel(l - 0.5, n, k, dx) * bt1;
          CMat rest = -kernel(double(l), n, k, dx) * bt;
          for (int s = 1; s <= m; ++s) {
            const int j = (l - 1) * m + s - 1;
            cd ker = kernel(rho[j], n, k, dx);
            R.block(col(l, s), col(n, k), m, m) = f * (rho[j] - rt_of(l, s)) * ker * beta[j];
            (s == 1 ? first : rest) += ker * beta[j];
          }
          R.block(col(l, m + 1), col(n, k), m, m) = f * first;
          R.block(col(l, m + 2), col(n, k), m, m) = f * rest;
        }
      }
    }
  }
  return a;
}

GraphReconstruction graph_reconstruct(const GraphSpectralData& d, const InverseOptions& o) {
  validate(o);
  if (d.N() < o.N) throw ValidationError("spectral data has fewer than N bands");
  const int m = d.m(), N = o.N, C = m + 2;
  const CMat T = projector_T(m), Tp = projector_Tperp(m);
  std::vector<CMat> E(o.M + 1), dE(o.M + 1);
  std::vector<double> cond(o.M + 1);
  parallel_for(o.M + 1, [&](std::size_t i) {
    const double x = i * kPi / o.M;
    RowSolve rs = solve_rows(graph_assemble(x, d, N, true), o.cond_limit);
    cond[i] = rs.cond;
    auto blk = [&](const CMat& v, int n, int k) {
      return v.block(0, ((n - 1) * C + (k - 1)) * m, m, m);
    };
    CMat e = CMat::Zero(m, m), de = CMat::Zero(m, m);
    for (int n = 1; n <= N; ++n) {
      const double a1 = n - 0.5, a2 = n;
      CMat p1 = blk(rs.psi, n, m + 1) / double(n), dp1 = blk(rs.dpsi, n, m + 1) / double(n);
      CMat p2 = blk(rs.psi, n, m + 2) / double(n), dp2 = blk(rs.dpsi, n, m + 2) / double(n);
      for (int k = 1; k <= m; ++k) {
        cd r = d.rho({n, k});
        cd rh = r - (k == 1 ? a1 : a2);
        CMat ph = (k == 1 ? p1 : p2) + rh * blk(rs.psi, n, k) / double(n);
        CMat dph = (k == 1 ? dp1 : dp2) + rh * blk(rs.dpsi, n, k) / double(n);
        CMat b = d.beta({n, k});
        double s = std::real(sin_over(x, r)), ds = std::real(std::cos(r * x));
        e += ph * b * s;
        de += dph * b * s + ph * b * ds;
      }
      const CMat b1 = (2.0 / kPi) * a1 * a1 * T, b2 = (2.0 / kPi) * a2 * a2 * Tp;
      double s1 = std::sin(a1 * x) / a1, ds1 = std::cos(a1 * x);
      double s2 = std::sin(a2 * x) / a2, ds2 = std::cos(a2 * x);
      e -= p1 * b1 * s1 + p2 * b2 * s2;
      de -= dp1 * b1 * s1 + p1 * b1 * ds1 + dp2 * b2 * s2 + p2 * b2 * ds2;
    }
    E[i] = e;
    dE[i] = de;
  });
  GraphReconstruction r;
  r.max_cond = *std::max_element(cond.begin(), cond.end());
  r.Q.resize(o.M + 1);
  for (int i = 0; i <= o.M; ++i) {
    CMat q = -2.0 * dE[i];
    r.herm_defect = std::max(r.herm_defect, herm_defect(q));
    r.Q[i] = o.symmetrize ? herm_part(q) : q;
  }
  std::vector<CMat> off = r.Q;
  for (auto& q : off) q.diagonal().setZero();
  r.offdiag_residual = l2_norm(off, kPi / o.M);
  r.edges.m = m;
  r.edges.M = o.M;
  r.edges.q.assign(m, std::vector<double>(o.M + 1));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i <= o.M; ++i) r.edges.q[j][i] = std::real(r.Q[i](j, j));
  return r;
}

GraphSpectralData graph_complete_with_model_tail(const GraphSpectralData& partial, int N) {
  GraphSpectralData out = graph_model_data(partial.m(), N);
  for (int n = 0; n < std::min(partial.N(), N); ++n) out.data.bands[n] = partial.data.bands[n];
  return out;
}

CMat graph_riesz_gram(const GraphSpectralData& d, int N) {
  const int m = d.m();
  N = std::min(N, d.N());
  const int P = N * m;
  std::vector<cd> rho(P), c(P);
  std::vector<CVec> v(P);
  for (int i = 0; i < P; ++i) {
    IndexPair p{i / m + 1, i % m + 1};
    rho[i] = d.rho(p);
    v[i] = d.v(p);
    // chi = c * sin(rho x)/rho, with the x branch at rho = 0.
    c[i] = std::abs(rho[i]) < 1e-8 ? cd(1) : rho[i];
  }
  CMat G(P, P);
  parallel_for(P, [&](std::size_t a) {
    for (int b = 0; b < P; ++b)
      G(a, b) = std::conj(c[a]) * c[b] * v[a].dot(v[b]) *
                sin_product_integral(kPi, std::conj(rho[a]), rho[b]);
  });
  return G;
}

double graph_riesz(const GraphSpectralData& d, int N) {
  CMat G = graph_riesz_gram(d, N);
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(G), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(0)));
}

std::vector<double> graph_Zj(const Partition& part, const GraphSpectralData& A,
                             const GraphSpectralData& B) {
  PairData pa = pair_data(A), pb = pair_data(B);
  std::vector<double> z;
  for (int j = 1; j <= A.m(); ++j) z.push_back(zeta_Zj(part, pa, pb, j).Z);
  return z;
}

}  // namespace matspec
