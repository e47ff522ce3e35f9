#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kym/cli.hpp"
#include "kym/io.hpp"

using namespace kym;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  int c = run_cli(args, o, e);
  return {c, o.str(), e.str()};
}

std::string input(const std::string& name) { return std::string(KYM_INPUT_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("kym_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_input(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return (dir / name).string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("instanton-check on the basic and two-center specs") {
  auto dir = scratch("inst");
  auto r = run({"instanton-check", "--input", input("basic_instanton.json"), "--out", dir.string()});
  CHECK(r.code == 0);
  auto j = read_json(dir / "instanton_check.json");
  CHECK(std::abs(j["charge"].get<double>() - 1) < 1e-3);
  CHECK(j["density_fit"]["residual"].get<double>() < 1e-8);
  CHECK(read_csv(dir / "instanton_samples.csv").rows().size() == 400);
  auto r2 = run({"instanton-check", "--input", input("thooft_k2.json")});
  CHECK(r2.code == 0);
  CHECK(std::abs(parse_json(r2.out)["charge"].get<double>() - 2) < 2e-2);
}

TEST_CASE("input errors exit with 2") {
  auto dir = scratch("bad");
  CHECK(run({"instanton-check", "--input", input("bad_scale.json")}).code == 2);
  CHECK(run({"instanton-check", "--input", write_input(dir, "m.json", "{\"centers\": [")}).code == 2);
  CHECK(run({"instanton-check", "--input", (dir / "missing.json").string()}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"stability"}).code == 2);
  auto nested = write_input(dir, "f.json",
                            R"({"bundle": [1, -1], "configs": [{"kind": "base_preserving", "filtration": [[2]], "weights": [1, 0]}]})");
  auto r = run({"stability", "--input", nested});
  CHECK(r.code == 2);
  CHECK(r.err.find("nested") != std::string::npos);
  CHECK(run({"continuation", "--input", input("continuation.json"), "--alpha", "abc"}).code == 2);
  CHECK(run({"laplacian-probe", "--input", write_input(dir, "l.json", R"({"lambda": [-1]})")}).code == 2);
}

TEST_CASE("continuation with zero target writes the seed row only") {
  auto dir = scratch("cont0");
  auto r = run({"continuation", "--input", input("continuation.json"), "--alpha", "0", "--out", dir.string()});
  CHECK(r.code == 0);
  auto t = read_csv(dir / "continuation.csv");
  REQUIRE(t.rows().size() == 1);
  CHECK(t.rows()[0][2] == "seed");
}

TEST_CASE("continuation rows, rescale row and determinism") {
  auto dir = scratch("cont");
  auto desc = write_input(dir, "d.json",
                          R"({"grid": {"nodes": 1200, "stretch": 1.0, "r_max": 100.0}, "alpha_target": 0.1, "dump_path": true})");
  auto out = dir / "a";
  auto r = run({"continuation", "--input", desc, "--out", out.string(), "--beta", "0.4", "--seed", "7"});
  REQUIRE(r.code == 0);
  auto t = read_csv(out / "continuation.csv");
  const auto& rows = t.rows();
  REQUIRE(rows.size() > 3);
  double prev = -1;
  for (const auto& row : rows) {
    CHECK(row[0] == "7");
    if (row[2] == "rescaled") continue;
    double a = std::stod(row[3]);
    CHECK(a > prev);
    prev = a;
    CHECK(std::stod(row[5]) < 1e-8);
    CHECK(std::stod(row[6]) < 1e-8);
    if (a > 0) CHECK(std::stod(row[7]) > 0);
  }
  const auto& last = rows.back();
  CHECK(last[2] == "rescaled");
  CHECK(std::stod(last[3]) == doctest::Approx(0.4));
  CHECK(std::stod(last[5]) <= 1e-8);
  CHECK(std::stod(last[6]) <= 1e-8);

  // three random rows from the dumped pairs
  auto grid = RadialGrid::origin(1.0, 100.0, 1200);
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> pick(1, rows.size() - 2);
  for (int trial = 0; trial < 3; ++trial) {
    const auto& row = rows[pick(rng)];
    auto dump = read_csv(out / "pairs" / ("step_" + row[1] + ".csv"));
    auto P = radial_pair_from_table(dump, grid, 1.0, std::stod(row[3]));
    CHECK(P.residual_scalar == doctest::Approx(std::stod(row[5])).epsilon(1e-6));
    CHECK(P.residual_hermitian <= 1e-8);
    CHECK(P.metric.scalar_spread() == doctest::Approx(std::stod(row[7])).epsilon(1e-12));
  }

  auto again = dir / "b";
  REQUIRE(run({"continuation", "--input", desc, "--out", again.string(), "--beta", "0.4", "--seed", "7"}).code == 0);
  CHECK(slurp(out / "continuation.csv") == slurp(again / "continuation.csv"));
  CHECK(slurp(out / "solution.csv") == slurp(again / "solution.csv"));
}

TEST_CASE("continuation past the fold reports partial results") {
  auto dir = scratch("fold");
  auto desc = write_input(dir, "d.json",
                          R"({"grid": {"nodes": 600, "stretch": 1.0, "r_max": 100.0}, "alpha_target": 2.0, "initial_step": 0.05})");
  auto r = run({"continuation", "--input", desc, "--out", dir.string()});
  CHECK(r.code == 3);
  auto j = read_json(dir / "summary.json");
  CHECK(!j["reached_target"].get<bool>());
  CHECK(j["max_alpha"].get<double>() > 0.3);
  CHECK(read_csv(dir / "continuation.csv").rows().size() > 1);
}

TEST_CASE("stability verdicts from files") {
  auto r = run({"stability", "--input", input("split_bundle.json")});
  REQUIRE(r.code == 0);
  auto j = parse_json(r.out);
  CHECK(j["verdict"] == "destabilized");
  CHECK(j["witness_form"] == "-alpha/2");
  CHECK(j["configs"][0]["value"] == "-1/2");

  auto z = parse_json(run({"stability", "--input", input("trivial_rank2.json"), "--alpha", "5/3"}).out);
  for (const auto& c : z["configs"]) CHECK(c["value"] == "0/1");
  CHECK(z["witness"].is_null());

  auto f = parse_json(run({"stability", "--input", input("split_bundle.json"), "--alpha", "0"}).out);
  CHECK(f["witness"].is_null());
  CHECK(f["configs"][0]["value"] == f["configs"][0]["futaki"]);

  auto dir = scratch("stab");
  auto all = write_input(dir, "e.json", R"({"bundle": [2, 0, -1], "alpha": "1/3"})");
  auto s = run({"stability", "--input", all, "--out", dir.string()});
  CHECK(s.code == 0);
  CHECK(read_csv(dir / "stability.csv").rows().size() == 6);
}

TEST_CASE("futaki and laplacian-probe subcommands") {
  auto r = run({"futaki", "--input", input("bridge_split.json")});
  CHECK(r.code == 0);
  CHECK(parse_json(r.out)["relative"].get<double>() < 1e-4);
  auto dir = scratch("probe");
  auto p = run({"laplacian-probe", "--input", input("probe.json"), "--out", dir.string()});
  CHECK(p.code == 0);
  CHECK(read_csv(dir / "laplacian_probe.csv").rows().size() == 4);
}
