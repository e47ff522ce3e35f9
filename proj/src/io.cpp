#include "kym/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace kym {

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void CsvTable::add(const std::vector<std::string>& row) {
  if (row.size() != header_.size()) throw InputError("CSV row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    out += "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << str();
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  auto split = [](const std::string& s) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(cell);
    return v;
  };
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV " + path.string());
  CsvTable t(split(line));
  while (std::getline(in, line))
    if (!line.empty()) t.add(split(line));
  return t;
}

namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InputError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

InstantonSpec instanton_spec_from_json(const Json& j) {
  InstantonSpec s;
  for (const auto& c : get<std::vector<std::vector<double>>>(j, "centers")) {
    if (c.size() != 4) throw InputError("centers need four coordinates");
    s.centers.push_back(Quatd{c[0], c[1], c[2], c[3]});
  }
  s.scales = get<std::vector<double>>(j, "scales");
  if (s.scales.size() != s.centers.size()) throw InputError("one scale per center");
  s.validate();
  return s;
}

Json to_json(const InstantonSpec& s) {
  Json c = Json::array();
  for (const auto& q : s.centers) c.push_back({q[0], q[1], q[2], q[3]});
  return {{"centers", c}, {"scales", s.scales}};
}

SheafOnP1 sheaf_from_json(const Json& j) {
  SheafOnP1 E;
  try {
    E.splitting = j.get<std::vector<int>>();
  } catch (const Json::exception&) {
    throw InputError("a bundle is a list of integer degrees");
  }
  E.validate();
  return E;
}

TestConfig config_from_json(const Json& j) {
  TestConfig T;
  const auto kind = get<std::string>(j, "kind");
  if (kind == "trivial") {
    T.kind = TestConfig::Kind::trivial;
  } else if (kind == "product") {
    T.kind = TestConfig::Kind::product;
    auto u = get<std::vector<long>>(j, "base_weights");
    if (u.size() != 2) throw InputError("base_weights needs two entries");
    T.base_weights = {u[0], u[1]};
    if (j.contains("bundle_weights")) T.bundle_weights = get<std::vector<long>>(j, "bundle_weights");
  } else if (kind == "base_preserving") {
    T.kind = TestConfig::Kind::base_preserving;
    T.filtration = get<std::vector<std::vector<int>>>(j, "filtration");
    T.weights = get<std::vector<long>>(j, "weights");
  } else {
    throw InputError("unknown configuration kind '" + kind + "'");
  }
  return T;
}

Json to_json(const TestConfig& T) {
  Json j{{"kind", to_string(T.kind)}};
  if (T.kind == TestConfig::Kind::product) {
    j["base_weights"] = {T.base_weights[0], T.base_weights[1]};
    j["bundle_weights"] = T.bundle_weights;
  } else if (T.kind == TestConfig::Kind::base_preserving) {
    j["filtration"] = T.filtration;
    j["weights"] = T.weights;
  }
  return j;
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw InputError("rationals are given as \"p/q\" strings or integers");
}

Json to_json(const AlphaInvariant& a, const Rational& alpha) {
  auto F = [](const WeightExpansion& e) {
    return Json::array({to_string(e.F0), to_string(e.F1), to_string(e.F2)});
  };
  return {{"futaki", to_string(a.futaki)},
          {"slope_term", to_string(a.slope_term)},
          {"value", to_string(a.at(alpha))},
          {"form", linear_form(a.futaki, a.slope_term)},
          {"bundle_expansion", F(a.bundle)},
          {"base_expansion", F(a.base)}};
}

Json to_json(const Verdict& v, const std::vector<TestConfig>& configs, const Rational& alpha) {
  Json list = Json::array();
  for (std::size_t i = 0; i < v.configs.size(); ++i) {
    const auto& c = v.configs[i];
    list.push_back({{"config", to_json(configs[i])},
                    {"futaki", to_string(c.futaki)},
                    {"slope_term", to_string(c.slope_term)},
                    {"value", to_string(c.value)},
                    {"form", linear_form(c.futaki, c.slope_term)},
                    {"sign", c.sign},
                    {"product", c.product}});
  }
  Json j{{"alpha", to_string(alpha)}, {"verdict", v.label()}, {"configs", list}};
  if (v.witness) {
    j["witness"] = *v.witness;
    const auto& w = v.configs[*v.witness];
    j["witness_form"] = linear_form(w.futaki, w.slope_term);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(const BridgeReport& b) {
  return {{"alpha", b.alpha},       {"algebraic", b.algebraic}, {"numeric", b.numeric},
          {"absolute", b.absolute}, {"relative", b.relative},   {"hamiltonian_mean", b.hamiltonian_mean}};
}

CsvTable radial_pair_table(const SolutionPair& P, unsigned long seed) {
  if (!P.radial || !P.metric.grid) throw InputError("not a radial pair");
  const auto& g = *P.metric.grid;
  CsvTable t({"seed", "r", "s", "p", "f"});
  for (int i = 0; i < g.size(); ++i)
    t.add({std::to_string(seed), format_double(g.r(i)), format_double(g.s(i)), format_double(P.metric.p(i)),
           format_double(P.radial->f(i))});
  return t;
}

SolutionPair radial_pair_from_table(const CsvTable& t, const RadialGrid& grid, double b, double alpha, int k) {
  const auto& h = t.header();
  auto col = [&](const std::string& name) {
    auto it = std::find(h.begin(), h.end(), name);
    if (it == h.end()) throw InputError("missing column " + name);
    return std::size_t(it - h.begin());
  };
  const std::size_t cp = col("p"), cf = col("f");
  if (int(t.rows().size()) != grid.size()) throw InputError("dump and grid sizes differ");
  Eigen::VectorXd p(grid.size()), f(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    p(i) = std::stod(t.rows()[std::size_t(i)][cp]);
    f(i) = std::stod(t.rows()[std::size_t(i)][cf]);
  }
  RadialSystem sys;
  sys.grid = grid;
  sys.seed.b = b;
  sys.k = k;
  return assemble_radial_pair(sys, alpha, p, f);
}

}  // namespace kym
