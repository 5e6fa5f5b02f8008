#include <gtest/gtest.h>

#include <cmath>

#include "matspec/matspec.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace matspec;

namespace {

double sup(const CMat& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

InverseOptions opts(int N, int M) {
  InverseOptions o;
  o.N = N;
  o.M = M;
  return o;
}

StarGraphProblem sampled(int M, const std::vector<std::function<double(double)>>& q) {
  StarGraphProblem g;
  g.m = static_cast<int>(q.size());
  g.M = M;
  g.q.assign(g.m, std::vector<double>(M + 1));
  for (int j = 0; j < g.m; ++j)
    for (int i = 0; i <= M; ++i) g.q[j][i] = q[j](i * kPi / M);
  return g;
}

std::vector<double> sorted_lambda(const GraphSpectralData& d) {
  std::vector<double> l;
  for (int n = 1; n <= d.N(); ++n)
    for (int k = 1; k <= d.m(); ++k) l.push_back(d.data.lambda({n, k}));
  std::sort(l.begin(), l.end());
  return l;
}

}  // namespace

TEST(Star, ProjectorsAndValidation) {
  CMat T = projector_T(4), Tp = projector_Tperp(4);
  EXPECT_LT(sup(T * T - T), 1e-15);
  EXPECT_NEAR(T.trace().real(), 1.0, 1e-15);
  EXPECT_LT(sup(T + Tp - CMat::Identity(4, 4)), 1e-15);
  StarGraphProblem g = fixtures::graph_cos2(3, 100, 0.1);
  EXPECT_NO_THROW(validate(g));
  for (auto& v : g.q[1]) v += 0.01;
  EXPECT_THROW(validate(g), ValidationError);
}

TEST(GraphForward, ZeroPotentialsModelSpectrum) {
  StarGraphProblem g = fixtures::graph_cos2(3, 200, 0.0);
  GraphSpectralData d = graph_forward(g, 5);
  CMat T = projector_T(3), Tp = projector_Tperp(3);
  for (int n = 1; n <= 5; ++n) {
    EXPECT_NEAR(d.rho({n, 1}).real(), n - 0.5, 1e-8);
    EXPECT_NEAR(d.rho({n, 2}).real(), n, 1e-8);
    EXPECT_NEAR(d.rho({n, 3}).real(), n, 1e-8);
    const double a = n - 0.5;
    EXPECT_LT(sup(d.beta({n, 1}) - (2 / kPi) * a * a * T), 1e-7);
    EXPECT_LT(sup(d.beta({n, 2}) + d.beta({n, 3}) - (2 / kPi) * double(n) * n * Tp), 1e-7);
  }
}

TEST(GraphForward, SingleEdgeIsDirichletNeumann) {
  GraphSpectralData d = graph_forward(fixtures::graph_cos2(1, 200, 0.0), 6);
  for (int n = 1; n <= 6; ++n) EXPECT_NEAR(d.rho({n, 1}).real(), n - 0.5, 1e-8);
}

TEST(GraphForward, SymmetricStarAgainstFiniteElements) {
  GraphSpectralData d = graph_forward(fixtures::graph_cos2(3, 200, 0.1), 6);
  std::vector<std::function<double(double)>> q(3, [](double x) { return 0.1 * std::cos(2 * x); });
  auto ref = oracle::fd_star(q, 18, 2000);
  auto lam = sorted_lambda(d);
  for (int i = 0; i < 18; ++i) EXPECT_NEAR(lam[i], ref[i], 1e-4) << "i=" << i;
}

TEST(GraphForward, DistinctEdgesAgainstFiniteElements) {
  std::vector<std::function<double(double)>> q{[](double x) { return 0.5 * std::cos(x); },
                                               [](double x) { return -0.3 * std::cos(2 * x); }};
  GraphSpectralData d = graph_forward(sampled(200, q), 8);
  auto ref = oracle::fd_star(q, 16, 2000);
  auto lam = sorted_lambda(d);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(lam[i], ref[i], 1e-4) << "i=" << i;
}

TEST(GraphForward, EigenfunctionsOrthonormalUnderScaling) {
  StarGraphProblem g = fixtures::graph_cos2(3, 400, 0.1);
  GraphSolver s(g);
  GraphSpectralData d = s.forward(3);
  std::vector<std::vector<CMat>> Y;
  for (int n = 1; n <= 3; ++n)
    for (int k = 1; k <= 3; ++k) {
      auto t = s.trajectory(d.data.lambda({n, k}));
      std::vector<CMat> y;
      for (const auto& p : t.phi) y.push_back(GraphSpectralData::scale({n, k}) * p * d.v({n, k}));
      Y.push_back(y);
    }
  const double h = kPi / 400;
  for (std::size_t a = 0; a < Y.size(); ++a)
    for (std::size_t b = 0; b < Y.size(); ++b) {
      std::vector<CMat> f;
      for (std::size_t i = 0; i < Y[a].size(); ++i) f.push_back(Y[a][i].adjoint() * Y[b][i]);
      cd s2 = f[0](0, 0) + f.back()(0, 0);
      for (std::size_t i = 1; i + 1 < f.size(); ++i) s2 += f[i](0, 0) * (i % 2 ? 4.0 : 2.0);
      EXPECT_NEAR(std::abs(s2 * (h / 3) - double(a == b)), 0.0, 1e-7) << a << "," << b;
    }
}

TEST(GraphForward, ResiduesOfWeylMatrix) {
  // Sum of beta over a group of equal eigenvalues is -Res M.
  GraphSolver s(fixtures::graph_cos2(3, 200, 0.1));
  GraphSpectralData d = s.forward(2);
  std::vector<std::vector<IndexPair>> groups{{{1, 1}}, {{1, 2}, {1, 3}}, {{2, 1}}};
  for (const auto& g : groups) {
    CMat b = CMat::Zero(3, 3);
    for (auto p : g) b += d.beta(p);
    CMat res = oracle::residue([&](cd z) { return s.weyl(z); }, d.data.lambda(g[0]), 0.2);
    EXPECT_LT(sup(res + b), 1e-6) << "n=" << g[0].n << " k=" << g[0].k;
  }
}

TEST(GraphAssemble, ModelDataHasZeroOperator) {
  GraphSpectralData d = graph_model_data(3, 4);
  const double x = 1.3;
  auto a = graph_assemble(x, d, 4, true);
  EXPECT_LT(sup(a.R), 1e-15);
  EXPECT_LT(sup(a.dR), 1e-15);
  const int m = 3, C = 5;
  const CMat I = CMat::Identity(3, 3);
  for (int n = 1; n <= 4; ++n) {
    const double r1 = n - 0.5, r2 = n;
    auto blk = [&](int k) { return a.psi.block(0, ((n - 1) * C + k - 1) * m, m, m); };
    EXPECT_LT(sup(blk(4) - n * std::sin(r1 * x) / r1 * I), 1e-15);
    EXPECT_LT(sup(blk(5) - n * std::sin(r2 * x) / r2 * I), 1e-15);
    // d/drho of sin(rho x)/rho at the model value.
    const double q1 = x * std::cos(r1 * x) / r1 - std::sin(r1 * x) / (r1 * r1);
    EXPECT_LT(sup(blk(1) - n * q1 * I), 1e-12);
  }
}

TEST(GraphAssemble, SineOrthogonalityZero) {
  EXPECT_LT(std::abs(sin_product_integral(kPi, 1.0, 2.0)), 1e-15);
}

TEST(GraphAssemble, SineProductAgainstQuadrature) {
  const double x = 1.1, th = 0.6, r = 1.7;
  cd ref = oracle::adaptive([&](double t) { return cd(std::sin(th * t) * std::sin(r * t) / (th * r)); }, 0.0,
                            x, 1e-14);
  EXPECT_LT(std::abs(sin_product_integral(x, th, r) - ref), 1e-10);
}

TEST(GraphReconstruct, ModelDataGivesZero) {
  for (int m : {1, 3}) {
    auto r = graph_reconstruct(graph_model_data(m, 6), opts(6, 50));
    for (const auto& q : r.Q) EXPECT_LT(sup(q), 1e-11) << "m=" << m;
    EXPECT_LT(r.offdiag_residual, 1e-11);
  }
}

TEST(GraphReconstruct, RoundTrip) {
  StarGraphProblem g = fixtures::graph_cos2(3, 200, 0.1);
  GraphSpectralData d = graph_forward(g, 25);
  auto r = graph_reconstruct(d, opts(25, 200));
  for (int j = 0; j < 3; ++j) {
    std::vector<double> e(201);
    for (int i = 0; i <= 200; ++i) e[i] = r.edges.q[j][i] - g.q[j][i];
    EXPECT_LT(l2_norm(e, g.step()), 5e-2) << "edge " << j;
  }
  EXPECT_LT(r.offdiag_residual, 1e-3);
}

TEST(GraphRiesz, ModelBasis) {
  EXPECT_GT(graph_riesz(graph_model_data(3, 30), 30), 0.3);
}

TEST(GraphRiesz, DuplicateRhoDegenerate) {
  GraphSpectralData d = graph_model_data(2, 10);
  d.data.bands[3].lambda[0] = d.data.bands[2].lambda[0];
  d.data.bands[3].v[0] = d.data.bands[2].v[0];
  EXPECT_LT(graph_riesz(d, 10), 1e-3);
}

TEST(GraphRiesz, ZeroRhoUsesLinearBranch) {
  GraphSpectralData d = graph_model_data(2, 5);
  d.data.bands[0].lambda[0] = 0.0;
  double e = -1;
  EXPECT_NO_THROW(e = graph_riesz(d, 5));
  EXPECT_GT(e, 0.0);
  EXPECT_TRUE(std::isfinite(e));
}

TEST(GraphZj, DiagonalEntriesOnly) {
  GraphSpectralData a = graph_forward(fixtures::graph_cos2(3, 200, 0.1), 6), b = graph_model_data(3, 6);
  Partition p = band_partition(6, 3);
  auto zj = graph_Zj(p, a, b);
  ASSERT_EQ(zj.size(), 3u);
  const double Z = zeta_Z(p, pair_data(a), pair_data(b)).Z;
  for (int j = 1; j <= 3; ++j) {
    EXPECT_NEAR(zj[j - 1], zeta_Zj(p, pair_data(a), pair_data(b), j).Z, 1e-15);
    EXPECT_LE(zj[j - 1], Z + 1e-15);
  }
  for (double z : graph_Zj(singleton_partition(6, 3), a, a)) EXPECT_EQ(z, 0.0);
}
