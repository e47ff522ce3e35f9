#include "kym/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>

#include "CLI11.hpp"

#include "kym/io.hpp"
#include "kym/weighted.hpp"

namespace kym {

namespace fs = std::filesystem;

namespace {

void prepare(const RunDescriptor& d) {
  if (!d.out.empty()) fs::create_directories(d.out);
}

void emit(const RunDescriptor& d, std::ostream& out, const std::string& name, const Json& j) {
  out << j.dump(2) << "\n";
  if (!d.out.empty()) write_json(fs::path(d.out) / name, j);
}

void emit(const RunDescriptor& d, const std::string& name, const CsvTable& t) {
  if (!d.out.empty()) t.write(fs::path(d.out) / name);
}

template <class T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InputError(std::string("field '") + key + "' has the wrong type");
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw InputError(std::string("--") + what + " expects a number, got '" + s + "'");
  }
}

RadialGrid grid_from_json(const Json& j) {
  Json g = j.contains("grid") ? j["grid"] : Json::object();
  return RadialGrid::origin(value_or(g, "stretch", 1.0), value_or(g, "r_max", 100.0), value_or(g, "nodes", 2000));
}

}  // namespace

int cmd_instanton_check(const RunDescriptor& d, std::ostream& out) {
  prepare(d);
  Json in = read_json(d.input);
  InstantonSpec spec = instanton_spec_from_json(in);
  const double tol = d.tol.value_or(value_or(in, "tol", 1e-8));
  const int k = spec.charge();
  const double charge_tol = value_or(in, "charge_tol", k == 1 ? 1e-3 : 1e-2);
  const int count = value_or(in, "samples", 400);
  const double radius = value_or(in, "radius", 3.0);
  if (count < 3 || radius <= 0) throw InputError("samples >= 3 and radius > 0 required");

  std::mt19937_64 rng(d.seed);
  std::normal_distribution<double> N(0, 1);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Quatd> pts;
  for (int i = 0; i < count; ++i) {
    Quatd x{N(rng), N(rng), N(rng), N(rng)};
    pts.push_back(x * (radius * std::pow(U(rng), 0.25) / std::sqrt(x.norm2())));
  }
  auto t0 = std::chrono::steady_clock::now();
  auto A = k == 1 && spec.scales[0] == 1 && spec.centers[0].norm2() == 0 ? sample_basic(pts) : sample_thooft(spec, pts);
  auto F = curvature(A);
  auto res = asd_residual(F, flat_c2(1));
  double asd = 0;
  CsvTable table({"seed", "x0", "x1", "x2", "x3", "asd_residual", "density"});
  auto rho = chern_weil_density(F);
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F.interior(i)) asd = std::max(asd, res(Eigen::Index(i)));
    table.add({std::to_string(d.seed), format_double(pts[i][0]), format_double(pts[i][1]), format_double(pts[i][2]),
               format_double(pts[i][3]), format_double(res(Eigen::Index(i))), format_double(rho(Eigen::Index(i)))});
  }
  auto q = instanton_number(spec);
  const double charge_rel = std::abs(q.k - k) / k;
  Json report{{"seed", d.seed},
              {"spec", to_json(spec)},
              {"samples", count},
              {"asd_residual", asd},
              {"charge", q.k},
              {"charge_tail_bound", q.tail_bound},
              {"charge_relative_error", charge_rel},
              {"tol", tol},
              {"charge_tol", charge_tol}};
  bool pass = asd <= tol && charge_rel <= charge_tol;
  if (k == 1) {
    auto fit = density_shape_fit(F, spec.centers[0], spec.scales[0]);
    report["density_fit"] = {{"amplitude", fit.amplitude}, {"exponent", fit.exponent}, {"residual", fit.residual}};
    pass = pass && fit.residual <= tol;
  }
  report["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["pass"] = pass;
  emit(d, out, "instanton_check.json", report);
  emit(d, "instanton_samples.csv", table);
  return pass ? exit_pass : exit_numerical;
}

int cmd_continuation(const RunDescriptor& d, std::ostream& out) {
  prepare(d);
  Json in = read_json(d.input);
  RadialSystem sys;
  sys.grid = grid_from_json(in);
  sys.seed.b = value_or(in, "b", 1.0);
  sys.k = value_or(in, "k", 1);
  if (sys.k != 1) throw InputError("the radial sector carries charge one only");
  if (!(sys.seed.b > 0)) throw InputError("seed scale b must be positive");
  ContinuationOptions opt;
  opt.alpha_target = d.alpha ? parse_double(*d.alpha, "alpha") : value_or(in, "alpha_target", 0.0);
  opt.initial_step = value_or(in, "initial_step", opt.initial_step);
  opt.newton.tol = d.tol.value_or(value_or(in, "tol", 1e-8));
  std::optional<double> beta = d.beta;
  if (!beta && in.contains("beta")) beta = value_or(in, "beta", 0.0);
  const bool dump_path = value_or(in, "dump_path", false);

  auto res = newton_continuation(sys, opt);
  CsvTable table({"seed", "step", "kind", "alpha", "newton_iterations", "residual_scalar", "residual_hermitian",
                  "scalar_spread"});
  const std::string seed = std::to_string(d.seed);
  if (dump_path && !d.out.empty()) fs::create_directories(fs::path(d.out) / "pairs");
  int step = 0;
  for (const auto& P : res.path) {
    table.add({seed, std::to_string(step), step == 0 ? "seed" : "step", format_double(P.alpha),
               std::to_string(P.newton_iterations), format_double(P.residual_scalar),
               format_double(P.residual_hermitian), format_double(P.metric.scalar_spread())});
    if (dump_path && !d.out.empty())
      radial_pair_table(P, d.seed).write(fs::path(d.out) / "pairs" / ("step_" + std::to_string(step) + ".csv"));
    ++step;
  }
  const auto& last = res.path.back();
  if (!d.out.empty()) radial_pair_table(last, d.seed).write(fs::path(d.out) / "solution.csv");
  Json summary{{"seed", d.seed},
               {"alpha_target", opt.alpha_target},
               {"max_alpha", last.alpha},
               {"reached_target", res.reached_target},
               {"accepted_steps", int(res.path.size()) - 1},
               {"nodes", sys.grid.size()},
               {"charge", radial_charge(last)},
               {"diagnostic", res.diagnostic}};
  if (beta && res.reached_target) {
    auto Q = rescale_solution(last, *beta);
    table.add({seed, std::to_string(step), "rescaled", format_double(Q.alpha), "0", format_double(Q.residual_scalar),
               format_double(Q.residual_hermitian), format_double(Q.metric.scalar_spread())});
    if (!d.out.empty()) radial_pair_table(Q, d.seed).write(fs::path(d.out) / "rescaled.csv");
    summary["rescaled"] = {{"beta", Q.alpha},
                           {"residual_scalar", Q.residual_scalar},
                           {"residual_hermitian", Q.residual_hermitian},
                           {"charge", radial_charge(Q)}};
  }
  emit(d, "continuation.csv", table);
  if (d.out.empty()) out << table.str();
  out << "max alpha reached: " << format_double(last.alpha) << "\n";
  if (!d.out.empty()) write_json(fs::path(d.out) / "summary.json", summary);
  return res.reached_target ? exit_pass : exit_numerical;
}

int cmd_stability(const RunDescriptor& d, std::ostream& out) {
  prepare(d);
  Json in = read_json(d.input);
  if (!in.contains("bundle")) throw InputError("missing field 'bundle'");
  Triple X{sheaf_from_json(in["bundle"]), value_or(in, "polarization", 1)};
  Rational alpha = d.alpha ? parse_rational(*d.alpha) : (in.contains("alpha") ? rational_from_json(in["alpha"]) : Rational(0));
  std::vector<TestConfig> configs;
  if (in.contains("configs")) {
    for (const auto& c : in["configs"]) configs.push_back(config_from_json(c));
  } else {
    configs = subsum_configs(X.bundle);
  }
  for (const auto& c : configs) c.validate(X.bundle);
  auto v = stability_verdict(X, configs, alpha);
  Json j = to_json(v, configs, alpha);
  j["seed"] = d.seed;
  j["bundle"] = X.bundle.splitting;
  j["polarization"] = X.polarization_power;
  CsvTable table({"seed", "index", "kind", "futaki", "slope_term", "value", "sign"});
  for (std::size_t i = 0; i < configs.size(); ++i)
    table.add({std::to_string(d.seed), std::to_string(i), to_string(configs[i].kind), to_string(v.configs[i].futaki),
               to_string(v.configs[i].slope_term), to_string(v.configs[i].value), std::to_string(v.configs[i].sign)});
  emit(d, out, "stability.json", j);
  emit(d, "stability.csv", table);
  return exit_pass;
}

int cmd_futaki(const RunDescriptor& d, std::ostream& out) {
  prepare(d);
  Json in = read_json(d.input);
  if (!in.contains("bundle") || !in.contains("config")) throw InputError("futaki input needs 'bundle' and 'config'");
  SheafOnP1 E = sheaf_from_json(in["bundle"]);
  TestConfig T = config_from_json(in["config"]);
  BridgeOptions opt;
  opt.t_max = value_or(in, "t_max", opt.t_max);
  opt.samples = value_or(in, "samples", opt.samples);
  const double a0 = value_or(in, "alpha0", 1.0), a1 = value_or(in, "alpha1", 0.25);
  const double tol = d.tol.value_or(value_or(in, "tol", 1e-4));
  auto b = bridge_check(E, T, a0, a1, opt);
  auto form = alpha_form(E, T);
  Json j = to_json(b);
  j["seed"] = d.seed;
  j["form"] = linear_form(form.futaki, form.slope_term);
  j["tol"] = tol;
  const bool pass = b.relative <= tol;
  j["pass"] = pass;
  emit(d, out, "futaki.json", j);
  return pass ? exit_pass : exit_numerical;
}

int cmd_laplacian_probe(const RunDescriptor& d, std::ostream& out) {
  prepare(d);
  Json in = read_json(d.input);
  auto lambdas = value_or(in, "lambda", std::vector<double>{0.0});
  for (double l : lambdas)
    if (l < 0) throw InputError("eigenvalues of the sphere Laplacian are nonnegative");
  Json g = in.contains("grid") ? in["grid"] : Json::object();
  auto grid = RadialGrid::origin(value_or(g, "stretch", 0.05), value_or(g, "r_max", 2000.0), value_or(g, "nodes", 3000));
  InstantonProfile profile;
  const auto kind = value_or(in, "profile", std::string("instanton"));
  if (kind == "flat") profile.kind = InstantonProfile::Kind::flat;
  else if (kind != "instanton") throw InputError("profile is 'flat' or 'instanton'");
  profile.scale = value_or(in, "scale", 1.0);
  const double support = value_or(in, "support", 2.0);
  const double tol = d.tol.value_or(value_or(in, "tol", 0.15));
  auto roots = indicial_roots(lambdas);
  CsvTable table({"seed", "lambda", "predicted", "exponent", "fit_residual", "window_lo", "window_hi", "flagged"});
  Json rows = Json::array();
  bool pass = true;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    auto L = assemble_radial_laplacian(grid, lambdas[i], profile);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(grid.size());
    for (int j = 0; j < grid.size() && grid.r(j) < support; ++j) rhs(j) = std::exp(-grid.s(j));
    auto p = decay_probe(L, rhs);
    const double predicted = roots[i].second;
    pass = pass && !p.flagged && std::abs(p.exponent - predicted) <= tol;
    table.add({std::to_string(d.seed), format_double(lambdas[i]), format_double(predicted), format_double(p.exponent),
               format_double(p.fit_residual), format_double(p.window_lo), format_double(p.window_hi),
               p.flagged ? "1" : "0"});
    rows.push_back({{"lambda", lambdas[i]},
                    {"predicted", predicted},
                    {"exponent", p.exponent},
                    {"fit_residual", p.fit_residual},
                    {"window", {p.window_lo, p.window_hi}},
                    {"flagged", p.flagged}});
  }
  emit(d, out, "laplacian_probe.json", Json{{"seed", d.seed}, {"profile", kind}, {"tol", tol}, {"probes", rows}, {"pass", pass}});
  emit(d, "laplacian_probe.csv", table);
  return pass ? exit_pass : exit_numerical;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kym: coupled Kahler-Yang-Mills toolkit"};
  app.require_subcommand(1);
  RunDescriptor d;
  std::string alpha;
  double tol = 0, beta = 0;
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunDescriptor&, std::ostream&);
  };
  const Entry entries[] = {
      {"instanton-check", "ASD residual, charge and density fit of an instanton spec", cmd_instanton_check},
      {"continuation", "Newton continuation in the coupling on the radial sector", cmd_continuation},
      {"stability", "exact alpha-invariants of test configurations on P1", cmd_stability},
      {"futaki", "numeric character against the algebraic invariant", cmd_futaki},
      {"laplacian-probe", "decay exponents of the radial coupled Laplacian", cmd_laplacian_probe},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    auto* s = app.add_subcommand(e.name, e.help);
    s->add_option("--input", d.input, "JSON input")->required();
    s->add_option("--out", d.out, "output directory");
    s->add_option("--tol", tol, "tolerance");
    s->add_option("--seed", d.seed, "random seed");
    s->add_option("--alpha", alpha, "coupling (p/q for stability)");
    s->add_option("--beta", beta, "rescale target");
    subs.push_back({s, &e});
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << "kym: " << e.what() << "\n";
    return exit_input;
  }
  for (auto& [s, e] : subs) {
    if (!s->parsed()) continue;
    d.command = e->name;
    if (s->count("--tol")) d.tol = tol;
    if (s->count("--alpha")) d.alpha = alpha;
    if (s->count("--beta")) d.beta = beta;
    try {
      return e->fn(d, out);
    } catch (const InputError& x) {
      err << "kym " << e->name << ": input error: " << x.what() << "\n";
      return exit_input;
    } catch (const NumericalError& x) {
      err << "kym " << e->name << ": numerical failure: " << x.what() << "\n";
      return exit_numerical;
    } catch (const fs::filesystem_error& x) {
      err << "kym " << e->name << ": " << x.what() << "\n";
      return exit_input;
    }
  }
  return exit_input;
}

}  // namespace kym
