#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rydsim/cli.hpp"
#include "rydsim/errors.hpp"

using namespace rydsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "rydsim_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

int invoke(std::vector<std::string> args) {
  std::vector<char*> argv;
  args.insert(args.begin(), "rydsim");
  argv.reserve(args.size());
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const char* kCurveConfig = R"({
  "schema_version": 1,
  "experiment": "prep_fidelity_curve",
  "sampling": { "theta_k_grid": { "min_rad": 0.0, "max_rad": 1.2, "n_points": 13 } },
  "output": { "basename": "curve" }
})";

}  // namespace

TEST_CASE("config validation") {
  const auto good = write_config("good.json", kCurveConfig);
  CHECK_NOTHROW(load_config(good));

  const auto unknown = write_config("unknown.json", R"({
    "schema_version": 1,
    "experiment": "prep_fidelity_curve",
    "hamiltonian": { "frobnicate": 1 }
  })");
  CHECK_THROWS_WITH_AS(load_config(unknown),
                       "config.hamiltonian.frobnicate: unknown key",
                       ConfigurationError);

  const auto version = write_config("version.json", R"({
    "schema_version": 2,
    "experiment": "prep_fidelity_curve"
  })");
  CHECK_THROWS_AS(load_config(version), ConfigurationError);

  const auto experiment = write_config("experiment.json", R"({
    "schema_version": 1,
    "experiment": "does_not_exist"
  })");
  CHECK_THROWS_AS(load_config(experiment), ConfigurationError);

  const auto malformed = write_config("malformed.json", "{ not json");
  CHECK_THROWS_AS(load_config(malformed), ConfigurationError);
}

TEST_CASE("config hash is stable and input-sensitive") {
  const nlohmann::json a = {{"x", 1}, {"y", "z"}};
  const nlohmann::json b = {{"x", 2}, {"y", "z"}};
  CHECK(config_hash(a) == config_hash(a));
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("output directory resolution") {
  CHECK(resolve_output_dir("/tmp/explicit") == fs::path("/tmp/explicit"));
  setenv(kOutputDirEnvVar, "/tmp/from_env", 1);
  CHECK(resolve_output_dir("") == fs::path("/tmp/from_env"));
  CHECK(resolve_output_dir("/tmp/explicit") == fs::path("/tmp/explicit"));
  unsetenv(kOutputDirEnvVar);
  CHECK(resolve_output_dir("") == fs::path("."));
}

TEST_CASE("malformed configs exit with code 2") {
  const auto malformed = write_config("exit2.json", "{ not json");
  CHECK(invoke({"run", malformed.string()}) == 2);

  const auto empty_grid = write_config("empty_grid.json", R"({
    "schema_version": 1,
    "experiment": "prep_fidelity_curve",
    "sampling": { "theta_k_grid": { "max_rad": 1.0, "n_points": 0 } }
  })");
  CHECK(invoke({"sweep", empty_grid.string()}) == 2);

  const auto empty_sigmas = write_config("empty_sigmas.json", R"({
    "schema_version": 1,
    "experiment": "positional_monte_carlo",
    "sampling": { "sigmas_lambda0": [] }
  })");
  CHECK(invoke({"sweep", empty_sigmas.string()}) == 2);
}

TEST_CASE("sweep outputs are byte-identical across reruns") {
  const auto config = write_config("curve.json", kCurveConfig);
  const fs::path out_a = temp_dir() / "out_a";
  const fs::path out_b = temp_dir() / "out_b";
  REQUIRE(invoke({"sweep", config.string(), "-o", out_a.string()}) == 0);
  REQUIRE(invoke({"sweep", config.string(), "-o", out_b.string()}) == 0);

  const std::string series_a = slurp(out_a / "curve.tsv");
  CHECK(!series_a.empty());
  CHECK(series_a == slurp(out_b / "curve.tsv"));
  CHECK(slurp(out_a / "curve_summary.json") ==
        slurp(out_b / "curve_summary.json"));
  // header carries the config hash
  CHECK(series_a.find("config_hash: 0x") != std::string::npos);
}

TEST_CASE("run writes unitary and Lindblad file pairs when noise is set") {
  // Reduced blockade scale keeps this propagation cheap.
  const auto config = write_config("conversion.json", R"({
    "schema_version": 1,
    "experiment": "ghz_conversion",
    "hamiltonian": { "pathway": "zeta20", "v_invT": 300.0 },
    "noise": { "gamma_decay_invT": 0.1, "gamma_dephase_invT": 0.1 },
    "grid": { "record_points": 50 },
    "output": { "basename": "conv" }
  })");
  const fs::path out = temp_dir() / "conv_out";
  REQUIRE(invoke({"run", config.string(), "-o", out.string()}) == 0);

  const std::string unitary = slurp(out / "conv_unitary.tsv");
  const std::string lindblad = slurp(out / "conv_lindblad.tsv");
  REQUIRE(!unitary.empty());
  REQUIRE(!lindblad.empty());

  auto final_ghz = [](const std::string& text) {
    // F_GHZ is the first fidelity column (after t and P0..P3)
    const size_t last_line = text.rfind('\n', text.size() - 2);
    std::istringstream row(text.substr(last_line + 1));
    std::vector<double> values;
    double v;
    while (row >> v) values.push_back(v);
    REQUIRE(values.size() >= 6);
    return values[5];
  };
  CHECK(final_ghz(lindblad) < final_ghz(unitary));
}

TEST_CASE("validate reports residual pass/fail") {
  const auto good = write_config("pipeline.json", R"({
    "schema_version": 1,
    "experiment": "twisted_pipeline",
    "hamiltonian": { "s_label": 0.5, "residual_floor": 500.0 }
  })");
  CHECK(invoke({"validate", good.string()}) == 0);

  // dropping the fine detunings leaves an uncompensated term below the floor
  const auto zeroed = write_config("pipeline_zero.json", R"({
    "schema_version": 1,
    "experiment": "twisted_pipeline",
    "hamiltonian": { "s_label": 0.5, "residual_floor": 500.0,
                     "zero_fine_detunings": true }
  })");
  CHECK(invoke({"validate", zeroed.string()}) == 1);
}
