#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lydia/cli/commands.hpp"
#include "lydia/cli/config.hpp"
#include "lydia/errors.hpp"

using nlohmann::json;
using namespace lydia;
using namespace lydia::cli;

namespace {

json load_document(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov-damped inertial optimization: experiments and checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run optimizers / simulations from a JSON config");
  std::string config_path;
  std::optional<std::string> objective, output_dir;
  std::vector<std::string> optimizers, systems;
  std::optional<double> s, dt, T;
  std::optional<std::size_t> k_max, record_stride, per_decade, sample_stride;
  std::optional<std::uint64_t> seed;
  std::vector<double> x0, v0, coeffs;
  std::optional<double> eps;
  run->add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--objective", objective);
  run->add_option("--coeffs", coeffs, "quadratic coefficients");
  run->add_option("--eps", eps, "contmin half-width");
  run->add_option("--optimizer", optimizers, "lydia, lydia_unscaled, avd_nag, hbf, gd");
  run->add_option("--simulate", systems, "LD or AVD");
  run->add_option("-s,--step-size", s);
  run->add_option("--k-max", k_max);
  run->add_option("--dt", dt);
  run->add_option("-T,--duration", T, "elapsed simulated time");
  run->add_option("--x0", x0);
  run->add_option("--v0", v0);
  run->add_option("--record-stride", record_stride);
  run->add_option("--records-per-decade", per_decade);
  run->add_option("--sample-stride", sample_stride);
  run->add_option("-o,--output-dir", output_dir);
  run->add_option("--seed", seed);

  auto* figures = app.add_subcommand("figures", "regenerate figure data and plots");
  std::string which = "all";
  FigureOptions fig_options;
  figures->add_option("which", which, "fig1..fig5 or all");
  figures->add_option("-o,--output-dir", fig_options.output_dir);
  figures->add_option("--scale", fig_options.scale, "fraction of the full run length");

  auto* check = app.add_subcommand("check", "run the verification suite");
  CheckOptions check_options;
  check->add_option("--tol", check_options.monotonicity_tol_rel, "relative monotonicity tolerance");
  check->add_option("--seed", check_options.seed);
  check->add_option("--steps", check_options.lydia_steps, "LYDIA steps per monotonicity audit");

  auto* rates = app.add_subcommand("rates", "fit the final-decade exponent of a CSV column");
  std::string csv_path, column = "E";
  double decades = 1.0;
  rates->add_option("csv", csv_path)->required();
  rates->add_option("--column", column);
  rates->add_option("--decades", decades);

  auto* list = app.add_subcommand("list", "list registered objectives");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      json doc = load_document(config_path);
      if (objective || !coeffs.empty() || eps) {
        json obj = doc.contains("objective") && doc["objective"].is_object() ? doc["objective"]
                                                                             : json::object();
        if (doc.contains("objective") && doc["objective"].is_string())
          obj["name"] = doc["objective"];
        if (objective) obj["name"] = *objective;
        if (!coeffs.empty()) obj["params"]["coeffs"] = coeffs;
        if (eps) obj["params"]["eps"] = *eps;
        doc["objective"] = obj;
      }
      if (!optimizers.empty()) doc["optimizers"] = optimizers;
      if (!systems.empty()) {
        doc["simulations"] = json::array();
        for (const auto& sys : systems) doc["simulations"].push_back({{"system", sys}});
      }
      if (s) doc["s"] = *s;
      if (dt) doc["dt"] = *dt;
      if (T) doc["T"] = *T;
      if (k_max) doc["k_max"] = *k_max;
      if (record_stride) doc["record_stride"] = *record_stride;
      if (per_decade) doc["records_per_decade"] = *per_decade;
      if (sample_stride) doc["sample_stride"] = *sample_stride;
      if (seed) doc["seed"] = *seed;
      if (!x0.empty()) doc["x0"] = x0;
      if (!v0.empty()) doc["v0"] = v0;
      if (output_dir) doc["output_dir"] = *output_dir;
      return cmd_run(config_from_json(doc), std::cerr);
    }
    if (*figures) return cmd_figures(which, fig_options, std::cerr);
    if (*check) return cmd_check(check_options, std::cout);
    if (*rates) return cmd_rates(csv_path, column, decades, std::cout);
    if (*list) return cmd_list(std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
