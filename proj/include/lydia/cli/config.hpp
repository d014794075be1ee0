#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lydia/objectives.hpp"
#include "lydia/odesim.hpp"
#include "lydia/optimizers.hpp"

namespace lydia::cli {

struct SimulationSpec {
  System system;
  std::optional<double> t0;  // default 0 for LD, 1 for AVD
  Integrator integrator = Integrator::semi_implicit_euler;
};

/// One batch: a single objective, any number of discrete optimizers and
/// continuous simulations sharing the same start point.
struct ExperimentConfig {
  std::string objective = "quadratic";
  ObjectiveParams params;
  std::vector<OptimizerSpec> optimizers;
  std::vector<SimulationSpec> simulations;
  std::optional<double> s;  // default: preset step for the objective
  std::size_t k_max = 1000;
  double dt = 1e-3;
  double T = 10.0;  // elapsed simulated time
  std::optional<Point> x0;
  Point v0;
  std::size_t record_stride = 1;
  std::size_t records_per_decade = 0;
  std::size_t sample_stride = 1;
  double rate_decades = 1.0;
  std::string output_dir = "lydia_out";
  std::uint64_t seed = 0;
};

/// Default step-size: 1/L when L is known, except flat which uses 2e-5.
double default_step_size(const Objective& obj);

/// Throws ConfigError on unknown keys or malformed values.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Fully resolved echo (defaults filled in) for manifests.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Checks every job against the module preconditions. Throws ConfigError.
void validate(const ExperimentConfig& config);

OptimizerSpec optimizer_from_json(const nlohmann::json& j);
nlohmann::json optimizer_to_json(const OptimizerSpec& spec);

}  // namespace lydia::cli
