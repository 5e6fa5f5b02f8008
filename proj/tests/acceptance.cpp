// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <sys/wait.h>

#include "matspec/matspec.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace matspec;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kZeroLambdaTol = 1e-8;
constexpr double kZeroBetaTol = 1e-8;
constexpr double kZeroSeconds = 10;
constexpr double kOracleTol = 1e-4;
constexpr double kResidueTol = 1e-6;
constexpr double kRoundTripRatio = 0.5;
constexpr double kRoundTripAbs = 5e-2;
constexpr double kRoundTripSeconds = 120;
constexpr double kModelTol = 1e-12;
constexpr double kGramTol = 1e-10;
constexpr double kFailEps = 1e-3;
constexpr double kRatioSpread = 5;
constexpr double kSplitTol = 1e-10;
constexpr double kGraphRhoTol = 1e-8;
constexpr double kGraphBetaTol = 1e-6;
constexpr double kEdgeTol = 5e-2;
constexpr double kOffDiagTol = 1e-3;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double sup(const CMat& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

InverseOptions opts(int N, int M) {
  InverseOptions o;
  o.N = N;
  o.M = M;
  return o;
}

void zero_spectrum() {
  auto t0 = std::chrono::steady_clock::now();
  SpectralData d = forward(Coefficients::zero(2, 200), 15);
  const double secs = seconds_since(t0);
  double el = 0, eb = 0;
  for (int n = 1; n <= 15; ++n) {
    for (int k = 1; k <= 2; ++k) el = std::max(el, std::abs(d.lambda({n, k}) - double((n - 1) * (n - 1))));
    const double c = (n == 1 ? 1.0 : 2.0) / kPi;
    eb = std::max(eb, sup(d.beta_sum(n) - c * CMat::Identity(2, 2)));
  }
  report(1, "zero-problem spectrum", el < kZeroLambdaTol && eb < kZeroBetaTol && secs < kZeroSeconds,
         fmt("max|lambda err| %.2e", el) + fmt(", max|beta_n err| %.2e", eb) + fmt(", %.2f s", secs));
}

void oracle_equivalence() {
  auto lam = find_eigenvalues(fixtures::cos_problem(200), 10);
  auto ref = oracle::fd_neumann([](double x) { return std::cos(x); }, 10, 4000);
  double e = 0;
  for (int k = 0; k < 10; ++k) e = std::max(e, std::abs(lam[k] - ref[k]));
  report(2, "finite-difference oracle", e < kOracleTol, fmt("max|lambda - oracle| %.2e", e));
}

void residue_identity() {
  Coefficients c = fixtures::trig_problem(200);
  SpectralData d = forward(c, 4);
  DirectSolver s(c);
  std::vector<IndexPair> idx;
  std::vector<double> lam;
  for (int n = 1; n <= 4; ++n)
    for (int k = 1; k <= 2; ++k) {
      idx.push_back({n, k});
      lam.push_back(d.lambda({n, k}));
    }
  double e = 0;
  for (int i = 0; i < 5; ++i) {
    double gap = 1e9;
    for (std::size_t j = 0; j < lam.size(); ++j)
      if (int(j) != i) gap = std::min(gap, std::abs(lam[j] - lam[i]));
    CMat res = oracle::residue([&](cd z) { return s.weyl(z); }, lam[i], 0.4 * gap);
    e = std::max(e, sup(res - d.beta(idx[i])));
  }
  report(3, "Weyl residues", e < kResidueTol, fmt("max|Res M - v v*| %.2e", e));
}

double prefix_error(const Coefficients& c, const SpectralData& d, int p, int N) {
  SpectralData part = d;
  part.bands.resize(p);
  Coefficients r = reconstruct(complete_with_model_tail(part, N), opts(N, c.M));
  std::vector<CMat> diff(r.Q.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = r.Q[i] - c.Q[i];
  return l2_norm(diff, r.step());
}

void round_trip() {
  auto t0 = std::chrono::steady_clock::now();
  // The prefix sweep runs on M = 400, where the L2 quadrature resolves the
  // boundary layer of the truncated reconstruction.
  Coefficients fine = fixtures::cos_problem(400);
  SpectralData df = forward(fine, 20);
  double e[3];
  int i = 0;
  for (int p : {5, 10, 20}) e[i++] = prefix_error(fine, df, p, 20);
  Coefficients c = fixtures::cos_problem(200);
  const double abs25 = prefix_error(c, forward(c, 25), 25, 25);
  const double secs = seconds_since(t0);
  const bool dec = e[1] < e[0] && e[2] < e[1];
  const bool ok = dec && e[2] <= kRoundTripRatio * e[0] && abs25 <= kRoundTripAbs && secs < kRoundTripSeconds;
  report(4, "round-trip convergence", ok,
         fmt("err(5) %.4f", e[0]) + fmt(", err(10) %.4f", e[1]) + fmt(", err(20) %.4f", e[2]) +
             fmt(", err(20)/err(5) %.4f", e[2] / e[0]) + fmt(", err at N=25 %.4f", abs25) +
             fmt(" (limit %.0e)", kRoundTripAbs) + fmt(", %.1f s", secs));
}

void model_exactness() {
  double worst = 0;
  for (int N : {1, 5, 20})
    for (int M : {8, 50, 200})
      for (int m : {1, 3}) {
        Coefficients c = reconstruct(model_data(m, N), opts(N, M));
        worst = std::max({worst, sup(c.h), sup(c.H)});
        for (const auto& q : c.Q) worst = std::max(worst, sup(q));
      }
  report(5, "model exactness", worst < kModelTol, fmt("max|coefficient| %.2e", worst));
}

void riesz() {
  double g = 0;
  for (int N = 1; N <= 40; ++N) {
    CMat G = riesz_gram(model_data(2, N), N);
    g = std::max(g, sup(G - CMat::Identity(G.rows(), G.cols())));
  }
  const double e = riesz_lower_bound(fixtures::fail_data(40), 40);
  report(6, "Riesz diagnostics", g < kGramTol && e < kFailEps,
         fmt("max|G - I| %.2e", g) + fmt(", failing-example eps_hat %.2e", e));
}

void stability_ratios() {
  Coefficients c = fixtures::cos_problem(200);
  double lo = 1e300, hi = 0;
  std::string detail;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    auto r = stability_ratio(c, fixtures::cos_problem(200, 1 + delta), 20);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    detail += fmt("ratio(%.0e) ", delta) + fmt("%.4f, ", r.ratio);
  }
  report(7, "stability ratio", lo > 0 && hi / lo <= kRatioSpread, detail + fmt("spread %.3f", hi / lo));
}

std::pair<PairData, PairData> splitting(int N, double delta) {
  PairData A, B;
  CVec e1(2), e2(2), f1(2), f2(2);
  e1 << std::sqrt(2 / kPi), 0;
  e2 << 0, std::sqrt(2 / kPi);
  f1 << 1 / std::sqrt(kPi), 1 / std::sqrt(kPi);
  f2 << 1 / std::sqrt(kPi), -1 / std::sqrt(kPi);
  for (int n = 1; n <= N; ++n) {
    const double d = delta / (double(n) * n);
    A[{n, 1}] = {double(n - 1), -d, e1 * e1.adjoint()};
    A[{n, 2}] = {double(n - 1), d, e2 * e2.adjoint()};
    B[{n, 1}] = {double(n - 1), -d, f1 * f1.adjoint()};
    B[{n, 2}] = {double(n - 1), d, f2 * f2.adjoint()};
  }
  return {A, B};
}

void splitting_example() {
  // The truncated sum misses about 1.56 delta / N of the limit, so delta and N
  // are chosen to keep that below the tolerance.
  const double delta = 1e-9;
  const int N = 400;
  auto [A, B] = splitting(N, delta);
  const double Z = zeta_Z(band_partition(N, 2), A, B).Z;
  const double want = 4 * delta * kPi / std::sqrt(6.0);
  const double err = std::abs(Z - want);
  std::vector<double> part;
  for (int n : {25, 50, 100, 200}) {
    auto [a, b] = splitting(n, 1e-3);
    part.push_back(zeta_Z(singleton_partition(n, 2), a, b).Z);
  }
  bool grows = true;
  for (std::size_t i = 1; i < part.size(); ++i) grows = grows && part[i] > 2 * part[i - 1];
  report(8, "splitting example", err < kSplitTol && grows,
         fmt("|Z - 4 delta pi/sqrt 6| %.2e", err) + fmt(" at delta %.0e", delta) +
             fmt(", singleton Z(25) %.3g", part[0]) + fmt(" -> Z(200) %.3g", part.back()));
}

void graph_zero() {
  GraphSpectralData d = graph_forward(fixtures::graph_cos2(3, 200, 0.0), 10);
  CMat T = projector_T(3), Tp = projector_Tperp(3);
  double er = 0, eb = 0;
  std::vector<double> half;
  for (int n = 1; n <= 10; ++n) {
    er = std::max(er, std::abs(d.rho({n, 1}) - cd(n - 0.5)));
    for (int k = 2; k <= 3; ++k) er = std::max(er, std::abs(d.rho({n, k}) - cd(n)));
    const double a = n - 0.5;
    eb = std::max(eb, sup(d.beta({n, 1}) - (2 / kPi) * a * a * T));
    eb = std::max(eb, sup(d.beta({n, 2}) + d.beta({n, 3}) - (2 / kPi) * double(n) * n * Tp));
  }
  report(9, "graph zero problem", er < kGraphRhoTol && eb < kGraphBetaTol,
         fmt("max|rho err| %.2e", er) + fmt(", max|beta sum err| %.2e", eb));
}

void graph_round_trip() {
  StarGraphProblem g = fixtures::graph_cos2(3, 200, 0.1);
  auto r = graph_reconstruct(graph_forward(g, 25), opts(25, 200));
  double edge = 0;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> e(g.M + 1);
    for (int i = 0; i <= g.M; ++i) e[i] = r.edges.q[j][i] - g.q[j][i];
    edge = std::max(edge, l2_norm(e, g.step()));
  }
  report(10, "graph round trip", edge <= kEdgeTol && r.offdiag_residual <= kOffDiagTol,
         fmt("max edge L2 error %.4f", edge) + fmt(", off-diagonal residual %.4f", r.offdiag_residual) +
             fmt(" (limit %.0e)", kOffDiagTol));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism() {
  const fs::path dir = fs::temp_directory_path() / "matspec_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](int threads, const std::string& args) {
    const std::string cmd = std::string(MATSPEC_CLI_PATH) + " --threads " + std::to_string(threads) + " " +
                            args + " > /dev/null 2>&1";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) && WEXITSTATUS(s) == 0;
  };
  auto p = [&](const std::string& name, int t) { return (dir / (name + std::to_string(t) + ".json")).string(); };
  bool ok = true;
  int artifacts = 0;
  for (int t : {1, 3}) {
    ok = ok && run(t, "generate --kind trig --m 2 -M 100 --amplitude 0.5 --seed 11 -o " + p("prob", t));
    ok = ok && run(t, "forward --problem " + p("prob", t) + " -N 8 -o " + p("spec", t));
    ok = ok && run(t, "inverse --spectra " + p("spec", t) + " -N 8 -M 100 -o " + p("rec", t));
    ok = ok && run(t, "sweep --problem " + p("prob", t) + " -N 8 --prefixes 2,4,8 -o " + p("sweep", t));
    ok = ok && run(t, "graph roundtrip --edges 3 --problem " + std::string(MATSPEC_DATA_DIR) +
                          "/graph_cos2_m3.json -N 6 -o " + p("graph", t));
  }
  std::string bad;
  for (const char* name : {"prob", "spec", "rec", "sweep", "graph"}) {
    ++artifacts;
    if (!ok || slurp(p(name, 1)).empty() || slurp(p(name, 1)) != slurp(p(name, 3))) bad += std::string(" ") + name;
  }
  fs::remove_all(dir);
  report(11, "determinism across threads", ok && bad.empty(),
         ok ? (bad.empty() ? std::to_string(artifacts) + " artifacts byte-identical at 1 and 3 threads"
                           : "differs:" + bad)
            : std::string("a CLI run failed"));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{zero_spectrum,     oracle_equivalence, residue_identity,
                                                    round_trip,        model_exactness,    riesz,
                                                    stability_ratios,  splitting_example,  graph_zero,
                                                    graph_round_trip,  determinism};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(int(i) + 1, "criterion raised", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures ? 1 : 0;
}
