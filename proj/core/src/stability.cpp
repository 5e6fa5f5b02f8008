#include "matspec/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "matspec/core.hpp"
#include "matspec/direct.hpp"
#include "matspec/kernels.hpp"
#include "matspec/parallel.hpp"

namespace matspec {

PairData pair_data(const SpectralData& d) {
  PairData out;
  for (int n = 1; n <= d.N(); ++n)
    for (int k = 1; k <= d.m; ++k)
      out[{n, k}] = {double(n - 1), d.rho({n, k}) - double(n - 1), d.beta({n, k})};
  return out;
}

void check_partition(const Partition& p, int N, int m) {
  std::set<IndexPair> seen;
  for (const auto& g : p.groups) {
    if (g.empty()) throw ValidationError("partition has an empty group");
    for (const auto& ip : g) {
      if (ip.n < 1 || ip.n > N || ip.k < 1 || ip.k > m)
        throw ValidationError("partition index (" + std::to_string(ip.n) + "," +
                              std::to_string(ip.k) + ") out of range");
      if (!seen.insert(ip).second)
        throw ValidationError("partition groups are not disjoint");
    }
  }
  if (static_cast<int>(seen.size()) != N * m)
    throw ValidationError("partition does not cover the index set");
  if (!p.refined()) return;
  if (p.refinement.size() != p.groups.size())
    throw ValidationError("refinement size differs from group count");
  for (std::size_t s = 0; s < p.groups.size(); ++s) {
    std::vector<IndexPair> u;
    for (const auto& sub : p.refinement[s]) u.insert(u.end(), sub.begin(), sub.end());
    std::vector<IndexPair> g = p.groups[s];
    std::sort(u.begin(), u.end());
    std::sort(g.begin(), g.end());
    if (u != g || std::adjacent_find(u.begin(), u.end()) != u.end())
      throw ValidationError("refinement of group " + std::to_string(s + 1) +
                            " is not a disjoint cover");
  }
}

Partition band_partition(int N, int m) {
  Partition p;
  for (int n = 1; n <= N; ++n) {
    std::vector<IndexPair> g;
    for (int k = 1; k <= m; ++k) g.push_back({n, k});
    p.groups.push_back(g);
  }
  return p;
}

Partition singleton_partition(int N, int m) {
  Partition p;
  for (int n = 1; n <= N; ++n)
    for (int k = 1; k <= m; ++k) p.groups.push_back({{n, k}});
  return p;
}

namespace {

// Distinct omega values in order, each with the k having that value.
std::vector<std::vector<int>> omega_classes(const Eigen::VectorXd& omega) {
  std::vector<std::vector<int>> cls;
  for (int k = 0; k < omega.size(); ++k) {
    if (k > 0 && omega(k) < omega(k - 1))
      throw ValidationError("omega must be non-decreasing");
    if (k == 0 || omega(k) != omega(k - 1)) cls.emplace_back();
    cls.back().push_back(k + 1);
  }
  return cls;
}

}  // namespace

Partition canonical_refinement(int N, const Eigen::VectorXd& omega) {
  const int m = static_cast<int>(omega.size());
  Partition p = band_partition(N, m);
  auto cls = omega_classes(omega);
  for (int n = 1; n <= N; ++n) {
    std::vector<std::vector<IndexPair>> subs;
    for (const auto& c : cls) {
      std::vector<IndexPair> g;
      for (int k : c) g.push_back({n, k});
      subs.push_back(g);
    }
    p.refinement.push_back(subs);
  }
  return p;
}

RemainderNorms remainder_norms(const SpectralData& d, const Eigen::VectorXd& omega_in) {
  const int m = d.m;
  Eigen::VectorXd omega = omega_in.size() ? omega_in : Eigen::VectorXd::Zero(m);
  if (omega.size() != m) throw ValidationError("omega has wrong length");
  auto cls = omega_classes(omega);
  const bool general = cls.size() > 1 || omega.cwiseAbs().maxCoeff() > 0;
  RemainderNorms r;
  double ks = 0, Ks = 0, Gs = 0;
  for (int n = 1; n <= d.N(); ++n) {
    for (int k = 1; k <= m; ++k) {
      cd kap = double(n) * (d.rho({n, k}) - double(n - 1) - omega(k - 1) / (kPi * n));
      r.kappa.push_back(std::abs(kap));
      ks += std::norm(kap);
    }
    const double c = (n == 1 ? 1.0 : 2.0) / kPi;
    CMat V = d.V(n);
    double Kn = n * opnorm(V.adjoint() * V - c * CMat::Identity(m, m));
    r.K.push_back(Kn);
    Ks += Kn * Kn;
    if (general) {
      std::vector<double> row;
      for (const auto& cl : cls) {
        CMat S = CMat::Zero(m, m), I = CMat::Zero(m, m);
        for (int k : cl) {
          S += d.beta({n, k});
          I(k - 1, k - 1) = 1;
        }
        double g = opnorm(S - c * I);
        row.push_back(g);
        Gs += g * g;
      }
      r.K_groups.push_back(row);
    }
  }
  r.kappa_norm = std::sqrt(ks);
  r.K_norm = std::sqrt(Ks);
  r.K_groups_norm = std::sqrt(Gs);
  return r;
}

CMat riesz_gram(const SpectralData& d, int N) {
  const int m = d.m;
  N = std::min(N, d.N());
  const int P = N * m;
  std::vector<cd> rho(P);
  std::vector<CVec> v(P);
  for (int i = 0; i < P; ++i) {
    rho[i] = d.rho({i / m + 1, i % m + 1});
    v[i] = d.v({i / m + 1, i % m + 1});
  }
  CMat G(P, P);
  parallel_for(P, [&](std::size_t a) {
    for (int b = 0; b < P; ++b)
      G(a, b) = v[a].dot(v[b]) * cos_product_integral(kPi, rho[a], rho[b]);
  });
  return G;
}

namespace {

double sqrt_lambda_min(const CMat& G) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(G), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(0)));
}

}  // namespace

double riesz_lower_bound(const SpectralData& d, int N) { return sqrt_lambda_min(riesz_gram(d, N)); }

StabilityReport membership(const SpectralData& d, double Omega, double eps,
                           const Eigen::VectorXd& omega) {
  if (!(Omega > 0) || !(eps > 0)) throw ValidationError("Omega and eps must be positive");
  StabilityReport r;
  r.remainders = remainder_norms(d, omega);
  r.gram_bands = d.N();
  r.eps_hat = riesz_lower_bound(d, d.N());
  r.xi = xi_sequence(d);
  r.Omega = Omega;
  r.eps = eps;
  double rem = std::max(r.remainders.kappa_norm, r.remainders.K_norm);
  if (!r.remainders.K_groups.empty()) rem = std::max(rem, r.remainders.K_groups_norm);
  r.member = rem <= Omega && r.eps_hat >= eps;
  return r;
}

namespace {

std::vector<IndexPair> sorted(std::vector<IndexPair> g) {
  std::sort(g.begin(), g.end());
  return g;
}

const PairEntry& at(const PairData& d, IndexPair p) {
  auto it = d.find(p);
  if (it == d.end())
    throw ValidationError("index (" + std::to_string(p.n) + "," + std::to_string(p.k) +
                          ") missing from spectral data");
  return it->second;
}

double dist(const PairEntry& a, const PairEntry& b) {
  return std::abs((a.base - b.base) + (a.hat - b.hat));
}

double spread(const std::vector<IndexPair>& g, const PairData& A, const PairData& B) {
  double s = 0;
  for (std::size_t j = 1; j < g.size(); ++j)
    s += dist(at(A, g[j]), at(A, g[0])) + dist(at(B, g[j]), at(B, g[0]));
  return s;
}

CMat beta_diff(const std::vector<IndexPair>& g, const PairData& A, const PairData& B) {
  CMat D = at(A, g[0]).beta - at(B, g[0]).beta;
  for (std::size_t j = 1; j < g.size(); ++j) D += at(A, g[j]).beta - at(B, g[j]).beta;
  return D;
}

ZetaResult weighted(std::vector<double> v) {
  ZetaResult r;
  double s2 = 0;
  for (std::size_t s = 0; s < v.size(); ++s) {
    double t = (s + 1) * v[s];
    s2 += t * t;
  }
  r.zeta = std::move(v);
  r.Z = std::sqrt(s2);
  return r;
}

}  // namespace

ZetaResult zeta_Z(const Partition& part, const PairData& A, const PairData& B) {
  std::vector<double> z;
  for (const auto& g0 : part.groups) {
    auto g = sorted(g0);
    z.push_back(dist(at(A, g[0]), at(B, g[0])) + opnorm(beta_diff(g, A, B)) +
                spread(g, A, B));
  }
  return weighted(std::move(z));
}

ZetaResult zeta_Z(const Partition& part, const SpectralData& A, const SpectralData& B) {
  return zeta_Z(part, pair_data(A), pair_data(B));
}

ZetaResult zeta_Zj(const Partition& part, const PairData& A, const PairData& B, int j) {
  std::vector<double> z;
  for (const auto& g0 : part.groups) {
    auto g = sorted(g0);
    z.push_back(dist(at(A, g[0]), at(B, g[0])) +
                std::abs(beta_diff(g, A, B)(j - 1, j - 1)) + spread(g, A, B));
  }
  return weighted(std::move(z));
}

ZetaResult theta_Theta(const Partition& part, const PairData& A, const PairData& B) {
  std::vector<double> th;
  for (std::size_t s = 0; s < part.groups.size(); ++s) {
    std::vector<std::vector<IndexPair>> subs =
        part.refined() ? part.refinement[s] : std::vector<std::vector<IndexPair>>{part.groups[s]};
    double t = 0;
    for (const auto& sub0 : subs) {
      auto g = sorted(sub0);
      t += dist(at(A, g[0]), at(B, g[0])) + spread(g, A, B) +
           opnorm(beta_diff(g, A, B)) / double(s + 1);
    }
    t += opnorm(beta_diff(sorted(part.groups[s]), A, B));
    th.push_back(t);
  }
  return weighted(std::move(th));
}

ZetaResult theta_Theta(const Partition& part, const SpectralData& A, const SpectralData& B) {
  return theta_Theta(part, pair_data(A), pair_data(B));
}

namespace {

// Real ordering key: rho for real rho, -|rho| on the imaginary axis.
double key(cd r) { return r.real() - r.imag(); }

}  // namespace

Partition auto_partition(const PairData& A, const PairData& B, double gap) {
  if (!(gap > 0)) throw ValidationError("gap must be positive");
  std::vector<IndexPair> nodes;
  for (const auto& [p, e] : A) nodes.push_back(p);
  for (const auto& [p, e] : B)
    if (!A.count(p)) nodes.push_back(p);
  std::sort(nodes.begin(), nodes.end());
  auto id = [&](IndexPair p) {
    return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), p) - nodes.begin());
  };
  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  struct Pt {
    double v;
    IndexPair p;
  };
  std::vector<Pt> pts;
  for (const auto& [p, e] : A) pts.push_back({key(e.rho()), p});
  for (const auto& [p, e] : B) pts.push_back({key(e.rho()), p});
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.v < b.v || (a.v == b.v && a.p < b.p);
  });
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].v - pts[i - 1].v <= gap / pts[i].p.n) {
      int a = find(id(pts[i].p)), b = find(id(pts[i - 1].p));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

  std::map<int, std::vector<IndexPair>> comp;
  std::map<int, double> low;
  for (std::size_t i = 0; i < nodes.size(); ++i) comp[find(static_cast<int>(i))].push_back(nodes[i]);
  for (const auto& pt : pts) {
    int r = find(id(pt.p));
    if (!low.count(r)) low[r] = pt.v;
    else low[r] = std::min(low[r], pt.v);
  }
  std::vector<int> roots;
  for (const auto& [r, g] : comp) roots.push_back(r);
  std::sort(roots.begin(), roots.end(), [&](int a, int b) {
    if (low[a] != low[b]) return low[a] < low[b];
    return comp[a].front() < comp[b].front();
  });
  Partition p;
  for (int r : roots) p.groups.push_back(comp[r]);
  return p;
}

Partition auto_partition(const SpectralData& A, const SpectralData& B, double gap) {
  return auto_partition(pair_data(A), pair_data(B), gap);
}

RatioResult stability_ratio(const Coefficients& a, const Coefficients& b, int N,
                            const Partition& part) {
  if (a.m != b.m || a.M != b.M) throw ValidationError("problems must share m and the grid");
  SpectralData A = forward(a, N), B = forward(b, N);
  PairData pa = pair_data(A), pb = pair_data(B);
  Partition p = part.groups.empty() ? auto_partition(pa, pb, 0.5) : part;
  check_partition(p, N, a.m);
  std::vector<CMat> dq(a.M + 1);
  for (int i = 0; i <= a.M; ++i) dq[i] = a.Q[i] - b.Q[i];
  RatioResult r;
  r.numerator = l2_norm(dq, a.step()) + opnorm(a.h - b.h) + opnorm(a.H - b.H);
  r.Z = zeta_Z(p, pa, pb).Z;
  r.groups = static_cast<int>(p.groups.size());
  if (r.Z < 1e-14 && r.numerator > 1e-10)
    throw DegenerateZ("Z vanishes while the coefficients differ by " +
                      std::to_string(r.numerator));
  r.ratio = (r.Z < 1e-12 && r.numerator < 1e-12) || r.Z == 0 ? 0.0 : r.numerator / r.Z;
  return r;
}

}  // namespace matspec
