#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <utility>

#include "lydia/cli/config.hpp"
#include "lydia/odesim.hpp"

namespace lydia::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Writes one CSV per job plus manifest.json into config.output_dir.
/// Throws ConfigError (before creating anything) on an invalid config.
int cmd_run(const ExperimentConfig& config, std::ostream& log);

struct FigurePreset {
  std::string figure;
  std::string objective;
  double s = 0.0;
  Point x0;
  std::size_t k_max = 1'000'000;
  std::size_t records_per_decade = 200;
};

/// Presets for fig2..fig5 (four-method rate comparisons).
FigurePreset figure_preset(const std::string& which);

struct FigureOptions {
  std::string output_dir = "figures";
  // Scales k_max (fig2..5) and T (fig1) down for quick runs; 1 is full size.
  double scale = 1.0;
};

/// which in {fig1, fig2, fig3, fig4, fig5, all}.
int cmd_figures(const std::string& which, const FigureOptions& options, std::ostream& log);

/// LD right-hand side used by the identity checks; replaceable to test that
/// the checks detect a broken field.
using LdField = std::function<Derivative(const Objective&, double t, std::span<const double> x,
                                         std::span<const double> v)>;

struct CheckOptions {
  double monotonicity_tol_rel = 1e-12;
  std::uint64_t seed = 0;
  std::size_t lydia_steps = 100'000;
  LdField ld_field;  // empty: the real LD field
};

struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Objectives and starts used for the LD identity checks. Semi-implicit Euler
/// leaves a dE/dt defect of about dt |grad f|^2 / 2, so starts are kept where
/// that stays below 1e-2 E(t0) at dt = 1e-3.
std::vector<std::pair<Objective, Point>> identity_cases();

std::vector<CheckRow> run_checks(const CheckOptions& options);

/// Prints the table; returns kExitFailure if any row fails.
int cmd_check(const CheckOptions& options, std::ostream& out);

/// Fits the final `decades` of column `column` against `t` in an existing CSV
/// and prints the RateFit JSON.
int cmd_rates(const std::string& path, const std::string& column, double decades,
              std::ostream& out);

int cmd_list(std::ostream& out);

}  // namespace lydia::cli
