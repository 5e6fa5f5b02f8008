#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "matspec/graph.hpp"
#include "matspec/stability.hpp"
#include "matspec/types.hpp"

namespace matspec::io {

using nlohmann::json;

// Complex numbers are [re, im]; matrices are row lists.
json to_json(const CMat& a);
CMat matrix_from_json(const json& j, int rows, int cols, const std::string& what);

json to_json(const Coefficients& c);
json to_json(const SpectralData& d);
json to_json(const GraphSpectralData& d);
json to_json(const StarGraphProblem& g);
json to_json(const Partition& p);

// Shape errors throw ParseError. Semantic checks (Hermiticity, zero mean) are
// left to the consumers, which throw ValidationError.
Coefficients coefficients_from_json(const json& j);
SpectralData spectral_from_json(const json& j);
GraphSpectralData graph_spectral_from_json(const json& j);
StarGraphProblem graph_problem_from_json(const json& j);
Partition partition_from_json(const json& j);

json read_json(const std::string& path);
// Writes through a temporary file and a rename, so a failed run leaves no
// partial artifact.
void write_text(const std::string& path, const std::string& text);
std::string dump(const json& j);

}  // namespace matspec::io
