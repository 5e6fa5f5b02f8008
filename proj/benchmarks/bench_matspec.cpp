#include <benchmark/benchmark.h>

#include <cmath>

#include "matspec/matspec.hpp"

using namespace matspec;

namespace {

Coefficients trig(int m, int M) {
  Coefficients c = Coefficients::zero(m, M);
  for (int i = 0; i <= M; ++i)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) c.Q[i](a, b) = std::cos((a + b + 1) * c.x(i)) / (1 + std::abs(a - b));
  return c;
}

StarGraphProblem star(int m, int M) {
  StarGraphProblem g;
  g.m = m;
  g.M = M;
  g.q.assign(m, std::vector<double>(M + 1));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i <= M; ++i) g.q[j][i] = 0.1 * std::cos(2 * i * kPi / M);
  return g;
}

InverseOptions opts(int N, int M) {
  InverseOptions o;
  o.N = N;
  o.M = M;
  return o;
}

}  // namespace

static void BM_Propagate(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  Propagator p(trig(m, 200).Q);
  for (auto _ : st) {
    CMat y = CMat::Identity(m, m), yp = CMat::Zero(m, m);
    p.run(cd(40.0, 0.5), y, yp);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Propagate)->Arg(1)->Arg(2)->Arg(4);

static void BM_Forward(benchmark::State& st) {
  Coefficients c = trig(2, 200);
  const int N = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(forward(c, N));
}
BENCHMARK(BM_Forward)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  SpectralData d = forward(trig(2, 200), N);
  for (auto _ : st) benchmark::DoNotOptimize(assemble(1.3, d, N, true));
}
BENCHMARK(BM_Assemble)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_SolveRows(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  AssembledSystem a = assemble(1.3, forward(trig(2, 200), N), N, true);
  for (auto _ : st) benchmark::DoNotOptimize(solve_rows(a, 1e12));
}
BENCHMARK(BM_SolveRows)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& st) {
  SpectralData d = forward(trig(2, 100), 10);
  for (auto _ : st) benchmark::DoNotOptimize(reconstruct(d, opts(10, 100)));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

static void BM_GraphForward(benchmark::State& st) {
  StarGraphProblem g = star(3, 200);
  for (auto _ : st) benchmark::DoNotOptimize(graph_forward(g, 10));
}
BENCHMARK(BM_GraphForward)->Unit(benchmark::kMillisecond);

static void BM_GraphReconstruct(benchmark::State& st) {
  GraphSpectralData d = graph_forward(star(3, 100), 8);
  for (auto _ : st) benchmark::DoNotOptimize(graph_reconstruct(d, opts(8, 100)));
}
BENCHMARK(BM_GraphReconstruct)->Unit(benchmark::kMillisecond);

static void BM_RieszGram(benchmark::State& st) {
  SpectralData d = forward(trig(2, 200), 20);
  for (auto _ : st) benchmark::DoNotOptimize(riesz_lower_bound(d, 20));
}
BENCHMARK(BM_RieszGram)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
