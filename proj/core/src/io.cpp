#include "matspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace matspec::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + ": expected a number");
  return v.get<double>();
}

cd complex_from_json(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2) throw ParseError(what + ": expected [re, im]");
  return {number(v[0], what), number(v[1], what)};
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

void expect_array(const json& v, std::size_t n, const std::string& what) {
  if (!v.is_array() || v.size() != n)
    throw ParseError(what + ": expected an array of length " + std::to_string(n));
}

std::vector<IndexPair> group_from_json(const json& g) {
  if (!g.is_array() || g.empty()) throw ParseError("partition group must be a non-empty list");
  std::vector<IndexPair> out;
  for (const auto& p : g) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
      throw ParseError("partition entries must be [n, k] integer pairs");
    out.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  return out;
}

json group_to_json(const std::vector<IndexPair>& g) {
  json a = json::array();
  for (const auto& p : g) a.push_back(json::array({p.n, p.k}));
  return a;
}

}  // namespace

json to_json(const CMat& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(complex_to_json(a(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CMat matrix_from_json(const json& j, int rows, int cols, const std::string& what) {
  expect_array(j, rows, what);
  CMat a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    expect_array(j[r], cols, what);
    for (int c = 0; c < cols; ++c) a(r, c) = complex_from_json(j[r][c], what);
  }
  return a;
}

json to_json(const Coefficients& c) {
  json q = json::array();
  for (const auto& m : c.Q) q.push_back(to_json(m));
  return {{"m", c.m}, {"M", c.M}, {"Q", q}, {"h", to_json(c.h)}, {"H", to_json(c.H)}};
}

Coefficients coefficients_from_json(const json& j) {
  Coefficients c;
  c.m = int_field(j, "m");
  c.M = int_field(j, "M");
  if (c.m < 1 || c.M < 1) throw ParseError("m and M must be positive");
  const json& q = field(j, "Q");
  expect_array(q, c.M + 1, "Q");
  for (int i = 0; i <= c.M; ++i)
    c.Q.push_back(matrix_from_json(q[i], c.m, c.m, "Q[" + std::to_string(i) + "]"));
  c.h = matrix_from_json(field(j, "h"), c.m, c.m, "h");
  c.H = matrix_from_json(field(j, "H"), c.m, c.m, "H");
  return c;
}

json to_json(const SpectralData& d) {
  json bands = json::array();
  for (const auto& b : d.bands) {
    json vecs = json::array();
    for (const auto& v : b.v) {
      json col = json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) col.push_back(complex_to_json(v(i)));
      vecs.push_back(col);
    }
    bands.push_back({{"n", b.n}, {"lambda", b.lambda}, {"vectors", vecs}});
  }
  return {{"m", d.m}, {"bands", bands}};
}

SpectralData spectral_from_json(const json& j) {
  SpectralData d;
  d.m = int_field(j, "m");
  if (d.m < 1) throw ParseError("m must be positive");
  const json& bands = field(j, "bands");
  if (!bands.is_array()) throw ParseError("bands must be a list");
  int n = 0;
  for (const auto& bj : bands) {
    Band b;
    b.n = int_field(bj, "n");
    if (b.n != ++n) throw ParseError("bands must be numbered 1, 2, ... in order");
    const json& lam = field(bj, "lambda");
    expect_array(lam, d.m, "lambda of band " + std::to_string(b.n));
    for (const auto& l : lam) b.lambda.push_back(number(l, "lambda"));
    const json& vecs = field(bj, "vectors");
    expect_array(vecs, d.m, "vectors of band " + std::to_string(b.n));
    for (const auto& vj : vecs) {
      expect_array(vj, d.m, "vector of band " + std::to_string(b.n));
      CVec v(d.m);
      for (int i = 0; i < d.m; ++i) v(i) = complex_from_json(vj[i], "vector entry");
      b.v.push_back(v);
    }
    d.bands.push_back(std::move(b));
  }
  return d;
}

json to_json(const GraphSpectralData& d) {
  json j = to_json(d.data);
  j["kind"] = "graph";
  return j;
}

GraphSpectralData graph_spectral_from_json(const json& j) {
  if (j.is_object() && j.contains("kind") && j["kind"] != "graph")
    throw ParseError("expected graph spectral data");
  return {spectral_from_json(j)};
}

json to_json(const StarGraphProblem& g) { return {{"m", g.m}, {"M", g.M}, {"q", g.q}}; }

StarGraphProblem graph_problem_from_json(const json& j) {
  StarGraphProblem g;
  g.m = int_field(j, "m");
  g.M = int_field(j, "M");
  if (g.m < 1 || g.M < 1) throw ParseError("m and M must be positive");
  const json& q = field(j, "q");
  expect_array(q, g.m, "q");
  for (const auto& e : q) {
    expect_array(e, g.M + 1, "edge potential");
    std::vector<double> v;
    for (const auto& x : e) v.push_back(number(x, "edge potential"));
    g.q.push_back(std::move(v));
  }
  return g;
}

json to_json(const Partition& p) {
  json groups = json::array();
  for (const auto& g : p.groups) groups.push_back(group_to_json(g));
  if (!p.refined()) return groups;
  json ref = json::array();
  for (const auto& subs : p.refinement) {
    json s = json::array();
    for (const auto& g : subs) s.push_back(group_to_json(g));
    ref.push_back(s);
  }
  return {{"groups", groups}, {"refinement", ref}};
}

Partition partition_from_json(const json& j) {
  Partition p;
  const json& groups = j.is_object() ? field(j, "groups") : j;
  if (!groups.is_array()) throw ParseError("partition must be a list of groups");
  for (const auto& g : groups) p.groups.push_back(group_from_json(g));
  if (j.is_object() && j.contains("refinement")) {
    for (const auto& subs : j["refinement"]) {
      std::vector<std::vector<IndexPair>> s;
      for (const auto& g : subs) s.push_back(group_from_json(g));
      p.refinement.push_back(s);
    }
  }
  return p;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
    if (!out) throw ValidationError("cannot write " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ValidationError("cannot write " + path);
  }
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

}  // namespace matspec::io
