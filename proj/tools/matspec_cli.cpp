// matspec: command-line front end for the forward, inverse and stability
// computations. Artifacts are JSON (CSV for sweeps); every artifact carries
// the hash of the configuration that produced it.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "matspec/matspec.hpp"

using namespace matspec;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Frozen defaults.
constexpr int kDefaultBands = 25;
constexpr int kDefaultGrid = 200;
constexpr double kDefaultCondLimit = 1e12;
constexpr double kDefaultGap = 0.5;

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string out;
  int N = kDefaultBands;
  int M = kDefaultGrid;
  double cond_limit = kDefaultCondLimit;
  bool symmetrize = true;
  bool weights = false;
  double gap = kDefaultGap;
  std::string partition = "auto";
  std::vector<double> omega;
  double Omega = 0;
  double eps = 0;
  std::vector<int> prefixes{5, 10, 20};
  double dump_x = -1;
  int edges = 0;
  std::string kind = "cos";
  int m = 1;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  int threads = 0;

  // Everything that determines the numbers; paths and the worker count are
  // left out, input contents are hashed instead.
  json canonical() const {
    json in = json::array();
    for (const auto& p : inputs) in.push_back(hex(fnv1a(file_bytes(p))));
    return {{"command", command}, {"inputs", in},          {"N", N},
            {"M", M},             {"cond_limit", cond_limit}, {"symmetrize", symmetrize},
            {"weights", weights}, {"gap", gap},            {"partition", partition},
            {"omega", omega},     {"Omega", Omega},        {"eps", eps},
            {"prefixes", prefixes}, {"dump_x", dump_x},    {"edges", edges},
            {"kind", kind},       {"m", m},                {"amplitude", amplitude},
            {"seed", seed}};
  }
  std::string hash() const { return hex(fnv1a(canonical().dump())); }
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void write_manifest(const RunConfig& cfg, const std::string& hash, double seconds) {
  json m = {{"tool", "matspec"},
            {"version", kVersion},
            {"config", cfg.canonical()},
            {"config_hash", hash},
            {"seed", cfg.seed},
            {"threads", threads()},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                          "." + std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"seconds", seconds}};
  io::write_text(cfg.out + ".manifest.json", io::dump(m));
}

void emit(const RunConfig& cfg, json artifact, const Timer& t) {
  const std::string h = cfg.hash();
  artifact["config_hash"] = h;
  io::write_text(cfg.out, io::dump(artifact));
  write_manifest(cfg, h, t.seconds());
}

void require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ValidationError("--out is required");
}

InverseOptions inverse_options(const RunConfig& cfg) {
  InverseOptions o;
  o.N = cfg.N;
  o.M = cfg.M;
  o.cond_limit = cfg.cond_limit;
  o.symmetrize = cfg.symmetrize;
  validate(o);
  return o;
}

double l2_diff(const std::vector<CMat>& a, const std::vector<CMat>& b, double step) {
  std::vector<CMat> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return l2_norm(d, step);
}

json roundtrip_errors(const Coefficients& truth, const Reconstruction& r) {
  const Coefficients& c = r.c;
  double q = l2_diff(c.Q, truth.Q, c.step());
  double h = opnorm(c.h - truth.h), H = opnorm(c.H - truth.H);
  return {{"q_error_L2", q},
          {"h_error", h},
          {"H_error", H},
          {"total_error", q + h + H},
          {"herm_defect", r.herm_defect},
          {"max_cond", r.max_cond},
          {"omega_norm", opnorm(c.omega())}};
}

// ---- commands ---------------------------------------------------------------

void cmd_generate(const RunConfig& cfg) {
  Timer t;
  require_out(cfg);
  if (cfg.m < 1 || cfg.M < 3) throw ValidationError("need m >= 1 and M >= 3");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = cfg.amplitude;
  if (cfg.kind == "graph-zero" || cfg.kind == "graph-cos2") {
    StarGraphProblem g;
    g.m = cfg.m;
    g.M = cfg.M;
    g.q.assign(g.m, std::vector<double>(g.M + 1, 0.0));
    if (cfg.kind == "graph-cos2")
      for (int j = 0; j < g.m; ++j)
        for (int i = 0; i <= g.M; ++i) g.q[j][i] = a * std::cos(2 * i * kPi / g.M);
    emit(cfg, io::to_json(g), t);
    return;
  }
  Coefficients c = Coefficients::zero(cfg.m, cfg.M);
  if (cfg.kind == "zero") {
  } else if (cfg.kind == "cos") {
    for (int i = 0; i <= c.M; ++i) c.Q[i] = a * std::cos(c.x(i)) * CMat::Identity(c.m, c.m);
  } else if (cfg.kind == "trig") {
    // Hermitian sum_j A_j cos(j x) + B_j sin(j x) - mean, j = 1..3.
    std::vector<CMat> A, B;
    for (int j = 1; j <= 3; ++j) {
      CMat x(c.m, c.m), y(c.m, c.m);
      for (int r = 0; r < c.m; ++r)
        for (int s = 0; s < c.m; ++s) {
          x(r, s) = cd(u(rng), u(rng));
          y(r, s) = cd(u(rng), u(rng));
        }
      A.push_back(herm_part(x) * (a / j));
      B.push_back(herm_part(y) * (a / j));
    }
    for (int i = 0; i <= c.M; ++i) {
      CMat q = CMat::Zero(c.m, c.m);
      for (int j = 1; j <= 3; ++j) q += A[j - 1] * std::cos(j * c.x(i)) + B[j - 1] * std::sin(j * c.x(i));
      c.Q[i] = q;
    }
    CMat mean = trapezoid(c.Q, c.step()) / kPi;
    for (auto& q : c.Q) q -= mean;
  } else {
    throw ValidationError("unknown problem kind " + cfg.kind);
  }
  emit(cfg, io::to_json(c), t);
}

void cmd_forward(const RunConfig& cfg) {
  Timer t;
  require_out(cfg);
  Coefficients c = io::coefficients_from_json(io::read_json(cfg.inputs.at(0)));
  if (cfg.N < 1) throw ValidationError("--bands must be >= 1");
  SpectralData d = forward(c, cfg.N);
  json j = io::to_json(d);
  if (cfg.weights) {
    json w = json::array();
    for (const auto& row : weight_matrices(d)) {
      json r = json::array();
      for (const auto& a : row) r.push_back(io::to_json(a));
      w.push_back(r);
    }
    j["weights"] = w;
  }
  emit(cfg, j, t);
}

void dump_system(const RunConfig& cfg, const AssembledSystem& a) {
  json j = {{"x", a.x}, {"N", a.N}, {"m", a.m}, {"blocks_per_band", a.cols},
            {"psi_tilde", io::to_json(a.psi)}, {"R", io::to_json(a.R)}};
  j["config_hash"] = cfg.hash();
  io::write_text(cfg.out + ".system.json", io::dump(j));
}

void cmd_inverse(const RunConfig& cfg) {
  Timer t;
  require_out(cfg);
  SpectralData d = io::spectral_from_json(io::read_json(cfg.inputs.at(0)));
  InverseOptions o = inverse_options(cfg);
  Reconstruction r = reconstruct_report(d, o);
  if (cfg.dump_x >= 0) dump_system(cfg, assemble(cfg.dump_x, d, o.N));
  json j = io::to_json(r.c);
  j["herm_defect"] = r.herm_defect;
  j["max_cond"] = r.max_cond;
  emit(cfg, j, t);
}

void cmd_roundtrip(const RunConfig& cfg) {
  Timer t;
  require_out(cfg);
  Coefficients c = io::coefficients_from_json(io::read_json(cfg.inputs.at(0)));
  RunConfig k = cfg;
  k.M = c.M;
  InverseOptions o = inverse_options(k);
  SpectralData d = forward(c, o.N);
  Reconstruction r = reconstruct_report(d, o);
  json j = roundtrip_errors(c, r);
  j["N"] = o.N;
  j["M"] = o.M;
  emit(cfg, j, t);
}

void cmd_sweep(const RunConfig& cfg) {
  Timer t;
  require_out(cfg);
  Coefficients c = io::coefficients_from_json(io::read_json(cfg.inputs.at(0)));
  RunConfig k = cfg;
  k.M = c.M;
  InverseOptions o = inverse_options(k);
  int pmax = 0;
  for (int p : cfg.prefixes) {
    if (p < 0 || p > o.N) throw ValidationError("prefix sizes must lie in [0, N]");
    pmax = std::max(pmax, p);
  }
  SpectralData full = pmax > 0 ? forward(c, pmax) : model_data(c.m, 0);
  std::ostringstream csv;
  csv.precision(12);
  csv << "# config_hash " << cfg.hash() << "\n";
  csv << "p,q_error_L2,h_error,H_error,total_error\n";
  for (int p : cfg.prefixes) {
    SpectralData part = full;
    part.bands.resize(p);
    Reconstruction r = reconstruct_report(complete_with_model_tail(part, o.N), o);
    json e = roundtrip_errors(c, r);
    csv << p << "," << e["q_error_L2"].get<double>() << "," << e["h_error"].get<double>() << ","
        << e["H_error"].get<double>() << "," << e["total_error"].get<double>() << "\n";
  }
  io::write_text(cfg.out, csv.str());
  write_manifest(cfg, cfg.hash(), t.seconds());
}

Partition load_partition(const RunConfig& cfg, const PairData& A, const PairData& B) {
  if (cfg.partition == "auto") return auto_partition(A, B, cfg.gap);
  if (cfg.partition == "bands") {
    int N = A.rbegin()->first.n, m = A.rbegin()->first.k;
    return band_partition(N, m);
  }
  if (cfg.partition == "singletons") {
    int N = A.rbegin()->first.n, m = A.rbegin()->first.k;
    return singleton_partition(N, m);
  }
  return io::partition_from_json(io::read_json(cfg.partition));
}

json zeta_json(const ZetaResult& z) { return {{"values", z.zeta}, {"norm", z.Z}}; }

void cmd_stability(const RunConfig& cfg, bool graph) {
  Timer t;
  require_out(cfg);
  json ja = io::read_json(cfg.inputs.at(0)), jb = io::read_json(cfg.inputs.at(1));
  json out;
  PairData A, B;
  int N = 0, m = 0;
  if (graph) {
    GraphSpectralData a = io::graph_spectral_from_json(ja), b = io::graph_spectral_from_json(jb);
    if (a.m() != b.m() || a.N() != b.N()) throw ValidationError("spectra differ in shape");
    A = pair_data(a);
    B = pair_data(b);
    N = a.N();
    m = a.m();
    out["eps_hat_a"] = graph_riesz(a, N);
    out["eps_hat_b"] = graph_riesz(b, N);
    Partition p = load_partition(cfg, A, B);
    check_partition(p, N, m);
    out["Z_j"] = graph_Zj(p, a, b);
  } else {
    SpectralData a = io::spectral_from_json(ja), b = io::spectral_from_json(jb);
    if (a.m != b.m || a.N() != b.N()) throw ValidationError("spectra differ in shape");
    A = pair_data(a);
    B = pair_data(b);
    N = a.N();
    m = a.m;
    Eigen::VectorXd om = Eigen::VectorXd::Zero(m);
    if (!cfg.omega.empty()) {
      if (static_cast<int>(cfg.omega.size()) != m) throw ValidationError("--omega needs m values");
      for (int k = 0; k < m; ++k) om(k) = cfg.omega[k];
    }
    for (const auto& [name, d] : {std::pair<const char*, const SpectralData*>{"a", &a}, {"b", &b}}) {
      RemainderNorms r = remainder_norms(*d, om);
      json rep = {{"kappa_norm", r.kappa_norm},
                  {"K_norm", r.K_norm},
                  {"eps_hat", riesz_lower_bound(*d, N)},
                  {"gram_bands", N},
                  {"xi", xi_sequence(*d)}};
      if (!r.K_groups.empty()) rep["K_groups_norm"] = r.K_groups_norm;
      if (cfg.Omega > 0 && cfg.eps > 0) rep["member"] = membership(*d, cfg.Omega, cfg.eps, om).member;
      out[std::string("report_") + name] = rep;
    }
    if (!cfg.omega.empty()) {
      Partition p = canonical_refinement(N, om);
      out["Theta"] = zeta_json(theta_Theta(p, A, B));
    }
  }
  Partition p = load_partition(cfg, A, B);
  check_partition(p, N, m);
  out["partition_groups"] = p.groups.size();
  out["zeta"] = zeta_json(zeta_Z(p, A, B));
  if (p.refined()) out["theta"] = zeta_json(theta_Theta(p, A, B));
  emit(cfg, out, t);
}

void cmd_partition(const RunConfig& cfg) {
  Timer t;
  require_out(cfg);
  SpectralData a = io::spectral_from_json(io::read_json(cfg.inputs.at(0)));
  SpectralData b = io::spectral_from_json(io::read_json(cfg.inputs.at(1)));
  Partition p = auto_partition(a, b, cfg.gap);
  json j = {{"groups", io::to_json(p)}};
  emit(cfg, j, t);
}

StarGraphProblem load_graph(const RunConfig& cfg) {
  StarGraphProblem g = io::graph_problem_from_json(io::read_json(cfg.inputs.at(0)));
  if (cfg.edges > 0 && cfg.edges != g.m)
    throw ValidationError("--edges " + std::to_string(cfg.edges) + " but the problem has " +
                          std::to_string(g.m) + " edges");
  validate(g);
  return g;
}

json graph_errors(const StarGraphProblem& truth, const GraphReconstruction& r) {
  json e = json::array();
  for (int j = 0; j < truth.m; ++j) {
    std::vector<double> d(truth.M + 1);
    for (int i = 0; i <= truth.M; ++i) d[i] = r.edges.q[j][i] - truth.q[j][i];
    e.push_back(l2_norm(d, truth.step()));
  }
  return e;
}

void cmd_graph(const RunConfig& cfg, const std::string& action) {
  Timer t;
  require_out(cfg);
  if (action == "forward") {
    StarGraphProblem g = load_graph(cfg);
    emit(cfg, io::to_json(graph_forward(g, cfg.N)), t);
  } else if (action == "inverse") {
    GraphSpectralData d = io::graph_spectral_from_json(io::read_json(cfg.inputs.at(0)));
    if (cfg.edges > 0 && cfg.edges != d.m()) throw ValidationError("--edges does not match the data");
    InverseOptions o = inverse_options(cfg);
    GraphReconstruction r = graph_reconstruct(d, o);
    if (cfg.dump_x >= 0) dump_system(cfg, graph_assemble(cfg.dump_x, d, o.N));
    json j = io::to_json(r.edges);
    j["offdiag_residual"] = r.offdiag_residual;
    j["herm_defect"] = r.herm_defect;
    j["max_cond"] = r.max_cond;
    emit(cfg, j, t);
  } else {
    StarGraphProblem g = load_graph(cfg);
    RunConfig k = cfg;
    k.M = g.M;
    InverseOptions o = inverse_options(k);
    GraphReconstruction r = graph_reconstruct(graph_forward(g, o.N), o);
    json j = {{"edge_error_L2", graph_errors(g, r)},
              {"offdiag_residual", r.offdiag_residual},
              {"herm_defect", r.herm_defect},
              {"max_cond", r.max_cond},
              {"N", o.N},
              {"M", o.M}};
    emit(cfg, j, t);
  }
}

void report(const Error& e) {
  json j = {{"error", e.kind()}, {"message", e.what()}, {"exit_code", e.code()}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matspec: direct and inverse spectral problems for matrix Sturm-Liouville operators"};
  app.require_subcommand(1);
  RunConfig cfg;
  int thread_flag = -1;
  app.add_option("--threads", thread_flag, "Worker threads (default: MATSPEC_THREADS, else all cores)");
  app.set_version_flag("--version", kVersion);

  auto add_N = [&](CLI::App* s) { s->add_option("--bands,-N", cfg.N, "Number of bands N")->capture_default_str(); };
  auto add_M = [&](CLI::App* s) { s->add_option("--grid,-M", cfg.M, "Grid intervals M")->capture_default_str(); };
  auto add_out = [&](CLI::App* s, const char* what) { s->add_option("--out,-o", cfg.out, what)->required(); };
  auto add_in = [&](CLI::App* s, const char* flag, const char* what) {
    s->add_option_function<std::string>(flag, [&](const std::string& p) { cfg.inputs.push_back(p); }, what)
        ->required();
  };
  auto add_cond = [&](CLI::App* s) {
    s->add_option("--cond-limit", cfg.cond_limit, "Largest accepted condition number")->capture_default_str();
  };

  auto* gen = app.add_subcommand("generate", "Write a bundled-style problem file");
  gen->add_option("--kind", cfg.kind, "zero | cos | trig | graph-zero | graph-cos2")->capture_default_str();
  gen->add_option("--m", cfg.m, "Matrix size or edge count")->capture_default_str();
  add_M(gen);
  gen->add_option("--amplitude", cfg.amplitude, "Potential scale")->capture_default_str();
  gen->add_option("--seed", cfg.seed, "Seed for random problems")->capture_default_str();
  add_out(gen, "Problem JSON");

  auto* fwd = app.add_subcommand("forward", "Eigenvalues and norming vectors");
  add_in(fwd, "--problem", "Problem JSON");
  add_N(fwd);
  fwd->add_flag("--weights", cfg.weights, "Also emit the weight matrices");
  add_out(fwd, "Spectra JSON");

  auto* inv = app.add_subcommand("inverse", "Reconstruct (Q, h, H) from spectral data");
  add_in(inv, "--spectra", "Spectra JSON");
  add_N(inv);
  add_M(inv);
  add_cond(inv);
  inv->add_flag("!--no-symmetrize", cfg.symmetrize, "Keep the raw non-Hermitian output");
  inv->add_option("--dump-system", cfg.dump_x, "Also write the assembled system at node x");
  add_out(inv, "Problem JSON");

  auto* rt = app.add_subcommand("roundtrip", "Forward then inverse, report errors");
  add_in(rt, "--problem", "Problem JSON");
  add_N(rt);
  add_cond(rt);
  add_out(rt, "Error report JSON");

  auto* sw = app.add_subcommand("sweep", "Finite-data convergence: error against prefix size p");
  add_in(sw, "--problem", "Problem JSON");
  add_N(sw);
  add_cond(sw);
  sw->add_option("--prefixes", cfg.prefixes, "Prefix band counts")->delimiter(',')->capture_default_str();
  add_out(sw, "CSV");

  auto* st = app.add_subcommand("stability", "Remainders, Riesz bound, zeta/Z/Theta between two spectra");
  add_in(st, "--spectra-a", "First spectra JSON");
  add_in(st, "--spectra-b", "Second spectra JSON");
  st->add_option("--partition", cfg.partition, "auto | bands | singletons | partition JSON")->capture_default_str();
  st->add_option("--gap", cfg.gap, "auto partition gap")->capture_default_str();
  st->add_option("--omega", cfg.omega, "Diagonal of omega (non-decreasing)")->delimiter(',');
  st->add_option("--Omega", cfg.Omega, "Remainder bound for membership");
  st->add_option("--eps", cfg.eps, "Riesz bound for membership");
  bool st_graph = false;
  st->add_flag("--graph", st_graph, "Inputs are graph spectra; adds per-edge Z_j");
  add_out(st, "Report JSON");

  auto* pa = app.add_subcommand("partition", "Automatic partition of two spectra");
  add_in(pa, "--spectra-a", "First spectra JSON");
  add_in(pa, "--spectra-b", "Second spectra JSON");
  pa->add_option("--gap", cfg.gap, "Gap parameter")->capture_default_str();
  add_out(pa, "Partition JSON");

  auto* gr = app.add_subcommand("graph", "Star-graph problems");
  gr->require_subcommand(1);
  auto* gf = gr->add_subcommand("forward", "Graph spectral data");
  add_in(gf, "--problem", "Graph problem JSON");
  gf->add_option("--edges", cfg.edges, "Expected edge count");
  add_N(gf);
  add_out(gf, "Spectra JSON");
  auto* gi = gr->add_subcommand("inverse", "Per-edge potentials from graph spectral data");
  add_in(gi, "--spectra", "Graph spectra JSON");
  gi->add_option("--edges", cfg.edges, "Expected edge count");
  add_N(gi);
  add_M(gi);
  add_cond(gi);
  gi->add_flag("!--no-symmetrize", cfg.symmetrize, "Keep the raw non-Hermitian output");
  gi->add_option("--dump-system", cfg.dump_x, "Also write the assembled system at node x");
  add_out(gi, "Graph problem JSON");
  auto* gt = gr->add_subcommand("roundtrip", "Graph forward then inverse");
  add_in(gt, "--problem", "Graph problem JSON");
  gt->add_option("--edges", cfg.edges, "Expected edge count");
  add_N(gt);
  add_cond(gt);
  add_out(gt, "Error report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    report(ParseError(e.what()));
    return 1;
  }

  int n = 0;
  if (const char* env = std::getenv("MATSPEC_THREADS")) n = std::atoi(env);
  if (thread_flag >= 0) n = thread_flag;
  set_threads(n);

  try {
    for (auto* s : app.get_subcommands()) {
      cfg.command = s->get_name();
      if (s == gr) {
        auto* a = gr->get_subcommands().front();
        cfg.command = "graph " + a->get_name();
        cmd_graph(cfg, a->get_name());
      } else if (s == gen) {
        cmd_generate(cfg);
      } else if (s == fwd) {
        cmd_forward(cfg);
      } else if (s == inv) {
        cmd_inverse(cfg);
      } else if (s == rt) {
        cmd_roundtrip(cfg);
      } else if (s == sw) {
        cmd_sweep(cfg);
      } else if (s == st) {
        cmd_stability(cfg, st_graph);
      } else if (s == pa) {
        cmd_partition(cfg);
      }
    }
  } catch (const Error& e) {
    report(e);
    return e.code();
  } catch (const std::exception& e) {
    report(Error("InternalError", e.what(), 3));
    return 3;
  }
  return 0;
}
