#include "rydsim/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydsim/errors.hpp"
#include "rydsim/schemes.hpp"

namespace rydsim {

namespace {

using nlohmann::json;

const std::set<std::string> kExperiments = {
    "prep_chiral_w",        "ghz_conversion",        "twisted_pipeline",
    "prep_fidelity_curve",  "positional_monte_carlo"};

// Allowed keys per config block; anything else is rejected with its path.
const std::map<std::string, std::set<std::string>> kBlockKeys = {
    {"geometry", {"side_lambda0", "theta_k_rad", "phi_k_rad"}},
    {"hamiltonian",
     {"pathway", "v_invT", "s_label", "residual_floor",
      "zero_fine_detunings"}},
    {"noise", {"gamma_decay_invT", "gamma_dephase_invT"}},
    {"grid",
     {"steps_per_period", "min_steps", "record_points", "halving_tol",
      "max_refinements"}},
    {"sampling",
     {"seed", "samples", "sigmas_lambda0", "theta_k_grid"}},
    {"output", {"basename"}},
    {"validate", {"hierarchy"}},
};

const std::set<std::string> kThetaGridKeys = {"min_rad", "max_rad",
                                              "n_points"};
const std::set<std::string> kHierarchyKeys = {
    "kappa_hz", "n_principal", "g_hz", "big_g_hz", "t_int_s",
    "ei_over_hbar_hz", "margin"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigurationError(path + ": " + what);
}

void check_keys(const json& object, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!object.is_object()) fail(path, "expected an object");
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown key");
  }
}

double get_number(const json& block, const std::string& key,
                  const std::string& path, double fallback) {
  if (!block.contains(key)) return fallback;
  if (!block[key].is_number()) fail(path + "." + key, "expected a number");
  return block[key].get<double>();
}

double require_number(const json& block, const std::string& key,
                      const std::string& path) {
  if (!block.contains(key)) fail(path + "." + key, "missing required key");
  if (!block[key].is_number()) fail(path + "." + key, "expected a number");
  return block[key].get<double>();
}

std::string require_string(const json& block, const std::string& key,
                           const std::string& path) {
  if (!block.contains(key)) fail(path + "." + key, "missing required key");
  if (!block[key].is_string()) fail(path + "." + key, "expected a string");
  return block[key].get<std::string>();
}

json block_or_empty(const json& config, const std::string& name) {
  return config.contains(name) ? config[name] : json::object();
}

StepControl step_control_from(const json& config) {
  const json grid = block_or_empty(config, "grid");
  StepControl control;
  control.steps_per_period = static_cast<int>(
      get_number(grid, "steps_per_period", "config.grid",
                 control.steps_per_period));
  control.min_steps = static_cast<int>(
      get_number(grid, "min_steps", "config.grid", control.min_steps));
  control.record_points = static_cast<int>(
      get_number(grid, "record_points", "config.grid", control.record_points));
  control.halving_tol =
      get_number(grid, "halving_tol", "config.grid", control.halving_tol);
  control.max_refinements = static_cast<int>(get_number(
      grid, "max_refinements", "config.grid", control.max_refinements));
  if (control.steps_per_period < 40) {
    fail("config.grid.steps_per_period",
         "the fastest period must be resolved by at least 40 steps");
  }
  return control;
}

NoiseModel noise_from(const json& config) {
  const json noise = block_or_empty(config, "noise");
  NoiseModel model;
  model.gamma_decay =
      get_number(noise, "gamma_decay_invT", "config.noise", 0.0);
  model.gamma_dephase =
      get_number(noise, "gamma_dephase_invT", "config.noise", 0.0);
  if (model.gamma_decay < 0.0 || model.gamma_dephase < 0.0) {
    fail("config.noise", "rates must be nonnegative");
  }
  return model;
}

std::uint64_t seed_from(const json& config, std::int64_t flag_seed) {
  if (flag_seed >= 0) return static_cast<std::uint64_t>(flag_seed);
  const json sampling = block_or_empty(config, "sampling");
  return static_cast<std::uint64_t>(
      get_number(sampling, "seed", "config.sampling", 1.0));
}

std::string basename_from(const json& config, const std::string& fallback) {
  const json output = block_or_empty(config, "output");
  if (!output.contains("basename")) return fallback;
  if (!output["basename"].is_string()) {
    fail("config.output.basename", "expected a string");
  }
  return output["basename"].get<std::string>();
}

std::string fmt(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12e", x);
  return buffer;
}

std::string hash_string(std::uint64_t hash) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "0x%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot open " + path.string());
  out << text;
}

std::string header_lines(const json& config, std::uint64_t seed,
                         const std::vector<std::string>& columns) {
  std::ostringstream out;
  out << "# tool_version: " << kToolVersion << "\n";
  out << "# config_hash: " << hash_string(config_hash(config)) << "\n";
  out << "# seed: " << seed << "\n";
  out << "# columns:";
  for (const auto& column : columns) out << "\t" << column;
  out << "\n";
  return out.str();
}

// Time-series file: '#'-commented header, then tab-separated rows of
// t, <P_0..P_N>, and the fidelity traces in name order.
void write_timeseries(const std::filesystem::path& path, const json& config,
                      std::uint64_t seed, const RunResult& run) {
  std::vector<std::string> columns = {"t"};
  const size_t n_pop = run.populations.front().size();
  for (size_t a = 0; a < n_pop; ++a) columns.push_back("P" + std::to_string(a));
  for (const auto& [name, trace] : run.fidelities) {
    columns.push_back("F_" + name);
  }

  std::ostringstream out;
  out << header_lines(config, seed, columns);
  for (size_t i = 0; i < run.times.size(); ++i) {
    out << fmt(run.times[i]);
    for (size_t a = 0; a < n_pop; ++a) out << "\t" << fmt(run.populations[i][a]);
    for (const auto& [name, trace] : run.fidelities) {
      out << "\t" << fmt(trace[i]);
    }
    out << "\n";
  }
  write_text(path, out.str());
}

json run_summary(const json& config, std::uint64_t seed, const RunResult& run,
                 const std::string& experiment) {
  json final_fidelities = json::object();
  for (const auto& [name, trace] : run.fidelities) {
    final_fidelities[name] = trace.back();
  }
  json summary = {
      {"tool_version", kToolVersion},
      {"config_hash", hash_string(config_hash(config))},
      {"seed", seed},
      {"experiment", experiment},
      {"pulse_energy", run.pulse_energy},
      {"norm_drift", run.norm_drift},
      {"trace_drift", run.trace_drift},
      {"halving_max_change", run.halving_max_change},
      {"final_populations", run.populations.back()},
      {"final_fidelities", final_fidelities},
  };
  return summary;
}

void write_summary(const std::filesystem::path& path, const json& summary) {
  write_text(path, summary.dump(2) + "\n");
}

struct PipelineConfig {
  double s_label = 0.0;
  double residual_floor = 500.0;
  bool zero_fine_detunings = false;
};

PipelineConfig pipeline_config_from(const json& config) {
  const json h = block_or_empty(config, "hamiltonian");
  PipelineConfig p;
  p.s_label = require_number(h, "s_label", "config.hamiltonian");
  p.residual_floor =
      get_number(h, "residual_floor", "config.hamiltonian", 500.0);
  if (h.contains("zero_fine_detunings")) {
    if (!h["zero_fine_detunings"].is_boolean()) {
      fail("config.hamiltonian.zero_fine_detunings", "expected a boolean");
    }
    p.zero_fine_detunings = h["zero_fine_detunings"].get<bool>();
  }
  return p;
}

}  // namespace

nlohmann::json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path.string());
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config parse error: " + std::string(e.what()));
  }
  validate_config(config, "config");
  return config;
}

void validate_config(const json& config, const std::string& config_name) {
  if (!config.is_object()) fail(config_name, "expected a JSON object");
  std::set<std::string> top = {"schema_version", "experiment"};
  for (const auto& [block, keys] : kBlockKeys) top.insert(block);
  check_keys(config, top, config_name);

  if (!config.contains("schema_version") ||
      !config["schema_version"].is_number_integer() ||
      config["schema_version"].get<int>() != 1) {
    fail(config_name + ".schema_version", "must be the integer 1");
  }
  const std::string experiment =
      require_string(config, "experiment", config_name);
  if (!kExperiments.count(experiment)) {
    fail(config_name + ".experiment", "unknown experiment '" + experiment + "'");
  }

  for (const auto& [block, keys] : kBlockKeys) {
    if (config.contains(block)) {
      check_keys(config[block], keys, config_name + "." + block);
    }
  }
  const json sampling = block_or_empty(config, "sampling");
  if (sampling.contains("theta_k_grid")) {
    check_keys(sampling["theta_k_grid"], kThetaGridKeys,
               config_name + ".sampling.theta_k_grid");
  }
  if (sampling.contains("sigmas_lambda0") &&
      !sampling["sigmas_lambda0"].is_array()) {
    fail(config_name + ".sampling.sigmas_lambda0", "expected an array");
  }
  const json validate = block_or_empty(config, "validate");
  if (validate.contains("hierarchy")) {
    check_keys(validate["hierarchy"], kHierarchyKeys,
               config_name + ".validate.hierarchy");
  }
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string canonical = config.dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::filesystem::path resolve_output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv(kOutputDirEnvVar); env && *env) return env;
  return ".";
}

int cmd_run(const CliOptions& options) {
  const json config = load_config(options.config_path);
  const std::string experiment = config["experiment"].get<std::string>();
  const StepControl control = step_control_from(config);
  const std::uint64_t seed = seed_from(config, options.seed);
  const std::filesystem::path out_dir = resolve_output_dir(options.output_dir);
  std::filesystem::create_directories(out_dir);
  const std::string basename = basename_from(config, experiment);

  if (experiment == "prep_chiral_w") {
    const json geometry = block_or_empty(config, "geometry");
    const double theta_k =
        require_number(geometry, "theta_k_rad", "config.geometry");
    const double v = get_number(block_or_empty(config, "hamiltonian"), "v_invT",
                                "config.hamiltonian", 3000.0);
    const RunResult run =
        prepare_twisted_w(2.0 * kPi * std::sin(theta_k), v, control);
    write_timeseries(out_dir / (basename + ".tsv"), config, seed, run);
    write_summary(out_dir / (basename + "_summary.json"),
                  run_summary(config, seed, run, experiment));
    if (options.verbosity > 0) {
      std::printf("final F(W_Phi) = %s\n", fmt(run.final_fidelity("W_Phi")).c_str());
    }
    return 0;
  }

  if (experiment == "ghz_conversion") {
    const json h = block_or_empty(config, "hamiltonian");
    const Pathway pathway =
        pathway_from_string(require_string(h, "pathway", "config.hamiltonian"));
    const double v = get_number(h, "v_invT", "config.hamiltonian", 3000.0);
    const NoiseModel noise = noise_from(config);
    const bool with_noise =
        noise.gamma_decay > 0.0 || noise.gamma_dephase > 0.0;

    const RunResult unitary = convert_w_to_ghz(pathway, NoiseModel{}, v, control);
    if (!with_noise) {
      write_timeseries(out_dir / (basename + ".tsv"), config, seed, unitary);
      write_summary(out_dir / (basename + "_summary.json"),
                    run_summary(config, seed, unitary, experiment));
      return 0;
    }
    // With noise configured, both the unitary reference and the open-system
    // run are written so the two traces can be compared directly.
    const RunResult open_run = convert_w_to_ghz(pathway, noise, v, control);
    write_timeseries(out_dir / (basename + "_unitary.tsv"), config, seed,
                     unitary);
    write_summary(out_dir / (basename + "_unitary_summary.json"),
                  run_summary(config, seed, unitary, experiment));
    write_timeseries(out_dir / (basename + "_lindblad.tsv"), config, seed,
                     open_run);
    write_summary(out_dir / (basename + "_lindblad_summary.json"),
                  run_summary(config, seed, open_run, experiment));
    return 0;
  }

  if (experiment == "twisted_pipeline") {
    const PipelineConfig p = pipeline_config_from(config);
    const PipelineResult result =
        twisted_ladder_pipeline(p.s_label, control, p.residual_floor);
    write_timeseries(out_dir / (basename + ".tsv"), config, seed, result.run);
    json summary = run_summary(config, seed, result.run, experiment);
    summary["s_label"] = result.s_label;
    summary["sigma_abs"] = result.sigma_abs;
    summary["total_time_T0"] = result.total_time;
    summary["min_residual_T0"] = result.min_residual;
    summary["fine_detunings_T0"] = result.detunings;
    write_summary(out_dir / (basename + "_summary.json"), summary);
    return 0;
  }

  throw ConfigurationError("experiment '" + experiment +
                           "' is a sweep; use the sweep command");
}

int cmd_sweep(const CliOptions& options) {
  const json config = load_config(options.config_path);
  const std::string experiment = config["experiment"].get<std::string>();
  const std::uint64_t seed = seed_from(config, options.seed);
  const std::filesystem::path out_dir = resolve_output_dir(options.output_dir);
  std::filesystem::create_directories(out_dir);
  const std::string basename = basename_from(config, experiment);
  const json sampling = block_or_empty(config, "sampling");

  if (experiment == "prep_fidelity_curve") {
    if (!sampling.contains("theta_k_grid")) {
      fail("config.sampling.theta_k_grid", "missing required key");
    }
    const json grid = sampling["theta_k_grid"];
    const double lo = get_number(grid, "min_rad", "config.sampling.theta_k_grid", 0.0);
    const double hi = require_number(grid, "max_rad", "config.sampling.theta_k_grid");
    const int n = static_cast<int>(
        require_number(grid, "n_points", "config.sampling.theta_k_grid"));
    if (n < 1) fail("config.sampling.theta_k_grid.n_points", "empty grid");
    std::vector<double> thetas(n);
    for (int i = 0; i < n; ++i) {
      thetas[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    const auto rows = prep_fidelity_curve(thetas);

    std::ostringstream out;
    out << header_lines(config, seed,
                        {"theta_k", "F_zeta10", "F_zeta1plus", "F_zeta1minus"});
    for (const auto& row : rows) {
      out << fmt(row.theta_k) << "\t" << fmt(row.f_zeta10) << "\t"
          << fmt(row.f_zeta1plus) << "\t" << fmt(row.f_zeta1minus) << "\n";
    }
    write_text(out_dir / (basename + ".tsv"), out.str());
    json summary = {{"tool_version", kToolVersion},
                    {"config_hash", hash_string(config_hash(config))},
                    {"seed", seed},
                    {"experiment", experiment},
                    {"n_points", n}};
    write_summary(out_dir / (basename + "_summary.json"), summary);
    return 0;
  }

  if (experiment == "positional_monte_carlo") {
    if (!sampling.contains("sigmas_lambda0")) {
      fail("config.sampling.sigmas_lambda0", "missing required key");
    }
    std::vector<double> sigmas;
    for (const auto& value : sampling["sigmas_lambda0"]) {
      if (!value.is_number()) {
        fail("config.sampling.sigmas_lambda0", "expected numbers");
      }
      sigmas.push_back(value.get<double>());
    }
    if (sigmas.empty()) fail("config.sampling.sigmas_lambda0", "empty grid");
    const int samples = static_cast<int>(
        get_number(sampling, "samples", "config.sampling", 500.0));
    if (samples < 1) fail("config.sampling.samples", "need at least 1 sample");

    const StepControl control = step_control_from(config);
    const MonteCarloSummary mc = positional_monte_carlo(
        sigmas, samples, seed, options.threads, control);

    std::ostringstream out;
    out << header_lines(
        config, seed,
        {"sigma", "mean_fidelity", "std_fidelity", "std_error", "sigma_d"});
    for (const auto& point : mc.points) {
      out << fmt(point.sigma) << "\t" << fmt(point.mean_fidelity) << "\t"
          << fmt(point.std_fidelity) << "\t" << fmt(point.std_error) << "\t"
          << fmt(point.sigma_d) << "\n";
    }
    write_text(out_dir / (basename + ".tsv"), out.str());

    json points = json::array();
    for (const auto& point : mc.points) {
      points.push_back({{"sigma", point.sigma},
                        {"mean_fidelity", point.mean_fidelity},
                        {"std_fidelity", point.std_fidelity},
                        {"std_error", point.std_error},
                        {"sigma_d", point.sigma_d}});
    }
    json summary = {{"tool_version", kToolVersion},
                    {"config_hash", hash_string(config_hash(config))},
                    {"seed", seed},
                    {"experiment", experiment},
                    {"samples", samples},
                    {"points", points}};
    write_summary(out_dir / (basename + "_summary.json"), summary);
    return 0;
  }

  throw ConfigurationError("experiment '" + experiment +
                           "' has no sweep; use the run command");
}

int cmd_validate(const CliOptions& options) {
  const json config = load_config(options.config_path);
  const std::string experiment = config["experiment"].get<std::string>();
  bool all_pass = true;

  if (experiment == "twisted_pipeline") {
    const PipelineConfig p = pipeline_config_from(config);
    const double v = 1247.0 / 6.3e-4;
    const EnergyShifts shifts = energy_shifts(0.021 * v, -0.7 * v, v);
    std::array<double, 3> detunings{};
    if (!p.zero_fine_detunings) detunings = fine_detunings(shifts);

    std::printf("light shifts s_a T_0: %s %s %s\n", fmt(shifts.s0).c_str(),
                fmt(shifts.s1).c_str(), fmt(shifts.s2).c_str());
    std::printf("fine detunings delta_j T_0: %s %s %s\n",
                fmt(detunings[0]).c_str(), fmt(detunings[1]).c_str(),
                fmt(detunings[2]).c_str());
    const auto residuals = residual_frequencies(shifts, detunings);
    double min_residual = std::abs(residuals[0]);
    for (double r : residuals) {
      std::printf("residual omega_R T_0: %s\n", fmt(r).c_str());
      min_residual = std::min(min_residual, std::abs(r));
    }
    const bool pass = min_residual >= p.residual_floor;
    std::printf("min |omega_R| T_0 = %s (floor %s): %s\n",
                fmt(min_residual).c_str(), fmt(p.residual_floor).c_str(),
                pass ? "pass" : "fail");
    all_pass = all_pass && pass;
  }

  const json validate = block_or_empty(config, "validate");
  if (validate.contains("hierarchy")) {
    const json h = validate["hierarchy"];
    HierarchyParams params;
    params.kappa = require_number(h, "kappa_hz", "config.validate.hierarchy");
    params.n_principal =
        require_number(h, "n_principal", "config.validate.hierarchy");
    params.g = require_number(h, "g_hz", "config.validate.hierarchy");
    params.big_g = require_number(h, "big_g_hz", "config.validate.hierarchy");
    params.t_int = require_number(h, "t_int_s", "config.validate.hierarchy");
    params.ei_over_hbar = get_number(h, "ei_over_hbar_hz",
                                     "config.validate.hierarchy", 1e16);
    params.margin = get_number(h, "margin", "config.validate.hierarchy", 10.0);
    const HierarchyReport report = hierarchy_check(params);
    for (const auto& link : report.links) {
      std::printf("hierarchy %s: %s << %s (ratio %s): %s\n",
                  link.name.c_str(), fmt(link.lhs).c_str(),
                  fmt(link.rhs).c_str(), fmt(link.ratio).c_str(),
                  link.pass ? "pass" : "fail");
    }
    all_pass = all_pass && report.all_pass;
  }

  std::printf("validate: %s\n", all_pass ? "pass" : "fail");
  return all_pass ? 0 : 1;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Rydberg-trimer state-engineering simulator"};
  app.require_subcommand(1);

  CliOptions options;
  auto add_common = [&options](CLI::App* sub) {
    sub->add_option("config", options.config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("-o,--output-dir", options.output_dir,
                    "output directory (default: $RYDSIM_OUTPUT_DIR or .)");
    sub->add_option("-s,--seed", options.seed,
                    "override the config's sampling seed");
    sub->add_option("-j,--threads", options.threads,
                    "worker threads for sweeps (0 = all cores)");
    sub->add_flag("-v,--verbose", options.verbosity, "increase verbosity");
  };
  CLI::App* run = app.add_subcommand("run", "propagate one experiment");
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  CLI::App* validate =
      app.add_subcommand("validate", "check parameters without propagating");
  add_common(run);
  add_common(sweep);
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(options);
    if (sweep->parsed()) return cmd_sweep(options);
    return cmd_validate(options);
  } catch (const OrthogonalDriveError& e) {
    std::fprintf(stderr, "orthogonal-drive error: %s\n", e.what());
    return 4;
  } catch (const IntegrationError& e) {
    std::fprintf(stderr, "integration error: %s\n", e.what());
    return 3;
  } catch (const ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace rydsim
