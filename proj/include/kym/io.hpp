#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "kym/coupled.hpp"
#include "kym/gauge.hpp"
#include "kym/stability.hpp"

namespace kym {

using Json = nlohmann::json;

// parse errors and missing files surface as InputError
Json read_json(const std::filesystem::path& path);
Json parse_json(const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

// shortest round-trip decimal
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(const std::vector<std::string>& row);
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::vector<std::string>& header() const { return header_; }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// reads a table written by CsvTable
CsvTable read_csv(const std::filesystem::path& path);

// {"centers": [[x0, x1, x2, x3], ...], "scales": [...]}
InstantonSpec instanton_spec_from_json(const Json& j);
Json to_json(const InstantonSpec& s);

SheafOnP1 sheaf_from_json(const Json& j);
// {"kind": "product", "base_weights": [u0, u1], "bundle_weights": [...]} or
// {"kind": "base_preserving", "filtration": [[...], ...], "weights": [...]} or {"kind": "trivial"}
TestConfig config_from_json(const Json& j);
Json to_json(const TestConfig& T);
// rationals as "p/q" strings or integers
Rational rational_from_json(const Json& j);

Json to_json(const AlphaInvariant& a, const Rational& alpha);
Json to_json(const Verdict& v, const std::vector<TestConfig>& configs, const Rational& alpha);
Json to_json(const BridgeReport& b);

// radial pair samples: r, s, p, f
CsvTable radial_pair_table(const SolutionPair& P, unsigned long seed);
// rebuilds a radial pair from a dumped table; grid nodes are taken as given
SolutionPair radial_pair_from_table(const CsvTable& t, const RadialGrid& grid, double b, double alpha, int k = 1);

}  // namespace kym
