#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "regstab/empirics.hpp"
#include "suite.hpp"

namespace regstab::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec == std::errc() && ptr == end) return out;
  // Accept integral values written in floating notation, e.g. 1e6.
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 1.8e19) {
    throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
  }
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  return os;
}

void write_text(const std::string& path, const std::string& text, std::ostream& stdout_stream) {
  if (path == "-") {
    stdout_stream << text;
    return;
  }
  auto os = open_output(path);
  os << text;
  os.close();
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "model",        "s",          "d",          "p",
      "n_reps",       "base_seed",  "nodes_per_axis", "panel_width",
      "truncation",   "max_dim_tensor", "grid_step", "mc_samples",
      "mc_seed",      "stratification", "lattice_n", "rho",
      "pad",          "grid_per_axis", "pair_grid_per_axis", "s_grid",
      "filter",       "effort",     "out",        "summary",
      "report",       "main_report"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "model") {
    try {
      model = std::string(to_string(parse_model_tag(v)));
    } catch (const std::exception&) {
      throw ConfigError("model: unknown model '" + v + "'");
    }
  } else if (key == "s") {
    s = to_double(key, v);
  } else if (key == "d") {
    d = to_uint(key, v);
  } else if (key == "p") {
    p = to_double(key, v);
  } else if (key == "n_reps") {
    n_reps = to_uint(key, v);
  } else if (key == "base_seed") {
    base_seed = to_uint(key, v);
  } else if (key == "nodes_per_axis") {
    quad.nodes_per_axis = static_cast<int>(to_uint(key, v));
  } else if (key == "panel_width") {
    quad.panel_width = to_double(key, v);
  } else if (key == "truncation") {
    quad.truncation = to_double(key, v);
  } else if (key == "max_dim_tensor") {
    quad.max_dim_tensor = to_uint(key, v);
  } else if (key == "grid_step") {
    quad.grid_step = to_double(key, v);
  } else if (key == "mc_samples") {
    mc.n_samples = to_uint(key, v);
  } else if (key == "mc_seed") {
    mc.base_seed = to_uint(key, v);
  } else if (key == "stratification") {
    mc.stratification = to_bool(key, v);
  } else if (key == "lattice_n") {
    lattice_n = static_cast<int>(to_uint(key, v));
  } else if (key == "rho") {
    rho = to_double(key, v);
  } else if (key == "pad") {
    pad = to_double(key, v);
  } else if (key == "grid_per_axis") {
    grid_per_axis = to_uint(key, v);
  } else if (key == "pair_grid_per_axis") {
    pair_grid_per_axis = to_uint(key, v);
  } else if (key == "s_grid") {
    s_grid = to_list(key, v);
  } else if (key == "filter") {
    filter = v;
  } else if (key == "effort") {
    effort = to_double(key, v);
  } else if (key == "out") {
    out = v;
  } else if (key == "summary") {
    summary = v;
  } else if (key == "report") {
    report = v;
  } else if (key == "main_report") {
    main_report = v;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void RunConfig::validate() const {
  try {
    quad.validate();
    mc.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!std::isfinite(s) || s < 0.0) throw ConfigError("s must be finite and >= 0");
  if (d < 1) throw ConfigError("d must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p must lie in (0, 1]");
  if (model == "lattice_isolated" && d != 2) throw ConfigError("the lattice model needs d = 2");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be >= 0");
  if (!(effort > 0.0)) throw ConfigError("effort must be > 0");
  if (grid_per_axis == 0 || pair_grid_per_axis == 0) throw ConfigError("grids need >= 1 cell");
  if (command == "simulate" && n_reps < 2) throw ConfigError("n_reps must be >= 2");
  if ((command == "bound" || command == "sweep") && model != "minimal" &&
      model != "lattice_isolated" && n_reps < 2) {
    throw ConfigError("n_reps must be >= 2 for an empirical variance");
  }
  if (command == "bound" && s < 1.0) throw ConfigError("bound needs s >= 1");
  if (command == "sweep") {
    if (s_grid.empty()) throw ConfigError("sweep needs s_grid");
    for (double v : s_grid) {
      if (!(v >= 1.0) || !std::isfinite(v)) throw ConfigError("sweep needs every s >= 1");
    }
  }
}

ScoreModel RunConfig::score_model() const {
  ScoreModel m;
  const ModelTag tag = parse_model_tag(model);
  switch (tag) {
    case ModelTag::minimal:
      m = minimal_model(s, d, p);
      break;
    case ModelTag::lattice_isolated:
      m = lattice_model(lattice_n);
      m.s = s;
      m.p = p;
      break;
    case ModelTag::rgg_isolated: {
      if (s <= 1.0 && rho == 0.0) throw ConfigError("rgg needs s > 1 or an explicit rho");
      const double r = rho > 0.0 ? rho : rgg_log_regime_radius(s, d);
      m = rgg_model(s, d, r);
      m.p = p;
      break;
    }
  }
  m.validate();
  return m;
}

IntensitySpec RunConfig::intensity(const ScoreModel& m) const {
  if (m.tag == ModelTag::rgg_isolated && pad >= 0.0) {
    return IntensitySpec::euclidean(m.s, m.weight_support, pad);
  }
  return default_intensity(m);
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  const auto model = config.score_model();
  const auto summary = run_ensemble(model, config.intensity(model), config.n_reps, config.base_seed);
  {
    std::ostringstream csv;
    summary.write_samples_csv(csv);
    write_text(config.out, csv.str(), log);
  }
  write_text(config.summary, summary.summary_json(), log);
  if (config.out != "-" && config.summary != "-") {
    log << "simulate: " << summary.n_reps << " replicates, mean " << summary.mean << ", var "
        << summary.var << (summary.degenerate ? " (degenerate)" : "") << '\n';
  }
  return kOk;
}

BoundReport evaluate_bound(const RunConfig& config) {
  if (config.s < 1.0) throw ConfigError("bound needs s >= 1");
  const auto model = config.score_model();
  const auto terms = outer_integrals(model, config.quad, config.mc);
  if (model.tag == ModelTag::minimal && model.d == 2) {
    return assemble_bound(model, terms, variance_mecke_minimal(model.s, 2, config.quad), "mecke");
  }
  if (model.tag == ModelTag::lattice_isolated) {
    return assemble_bound(model, terms, variance_lattice_exact(model), "mecke");
  }
  const auto ens = run_ensemble(model, config.intensity(model), config.n_reps, config.base_seed);
  if (ens.degenerate) throw std::runtime_error("empirical variance vanished");
  return assemble_bound(model, terms, ens.var, "empirical");
}

namespace {

std::string main_terms_json(const MainTheoremTerms& t) {
  nlohmann::ordered_json j;
  j["q_exponent"] = t.q_exponent;
  j["nodes"] = t.nodes.size();
  j["gamma_F"] = t.gamma_F;
  j["bracket_W"] = t.bracket_W;
  j["bracket_K"] = t.bracket_K;
  j["var_F"] = t.var_F;
  j["se_gamma_F"] = t.se_gamma_F;
  j["se_bracket_W"] = t.se_bracket_W;
  j["se_bracket_K"] = t.se_bracket_K;
  j["dW_bound"] = t.dW_bound;
  j["dK_bound"] = t.dK_bound;
  j["vacuous"] = t.vacuous;
  return j.dump(2) + "\n";
}

}  // namespace

int cmd_bound(const RunConfig& config, std::ostream& log) {
  const auto report = evaluate_bound(config);
  write_text(config.report, report.to_json(), log);
  if (!config.main_report.empty()) {
    const auto model = config.score_model();
    MainTermsSpec spec;
    spec.grid_per_axis = config.grid_per_axis;
    spec.pair_grid_per_axis = config.pair_grid_per_axis;
    spec.n_reps = config.n_reps;
    spec.base_seed = config.base_seed;
    const auto terms = estimate_main_terms(model, config.intensity(model), spec);
    write_text(config.main_report, main_terms_json(terms), log);
  }
  return kOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  auto all = nlohmann::ordered_json::array();
  for (double s : config.s_grid) {
    RunConfig one = config;
    one.s = s;
    const auto report = evaluate_bound(one);
    all.push_back(nlohmann::ordered_json::parse(report.to_json()));
    if (config.report != "-") log << "s = " << s << ": dK_norm " << report.dK_norm << '\n';
  }
  write_text(config.report, all.dump(2) + "\n", log);
  return kOk;
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  checks::Options options;
  options.seed = config.base_seed;
  options.effort = config.effort;
  options.strict_fault = config.strict_fault;
  const int failures = checks::run_tap(config.filter, options, log);
  return failures == 0 ? kOk : kCheckFailed;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and bound evaluation for sums of region-stabilizing scores"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> flags;
  bool fault = false;

  auto register_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value file; flags take precedence");
    for (const auto& key : RunConfig::keys()) {
      std::string names = "--" + key;
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != key) names += ",--" + dashed;
      if (key == "n_reps") names += ",--reps";
      if (key == "base_seed") names += ",--seed";
      sub->add_option_function<std::string>(
          names, [&flags, key](const std::string& v) { flags.emplace_back(key, v); }, key);
    }
  };
  auto* simulate = app.add_subcommand("simulate", "Run an ensemble; write samples CSV and summary");
  auto* bound = app.add_subcommand("bound", "Evaluate the Kolmogorov and Wasserstein bounds");
  auto* verify = app.add_subcommand("verify", "Run the property suites (TAP output)");
  auto* sweep = app.add_subcommand("sweep", "Bound reports over s_grid");
  for (auto* sub : {simulate, bound, verify, sweep}) register_options(sub);
  verify->add_flag("--inject-strict-dominance", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kBadConfig;
  }

  RunConfig config;
  for (auto* sub : {simulate, bound, verify, sweep}) {
    if (sub->parsed()) config.command = sub->get_name();
  }
  try {
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_config_file(config_path)) config.set(k, v);
    }
    for (const auto& [k, v] : flags) config.set(k, v);
    config.strict_fault = fault;
    config.validate();
    if (config.command == "simulate") return cmd_simulate(config, out);
    if (config.command == "bound") return cmd_bound(config, out);
    if (config.command == "sweep") return cmd_sweep(config, out);
    return cmd_verify(config, out);
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kBadConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}

}  // namespace regstab::cli
