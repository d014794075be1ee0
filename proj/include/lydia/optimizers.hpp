#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lydia/objectives.hpp"

namespace lydia {

/// One discrete optimizer state. Continuous time is t_k = k * sqrt(s).
struct IterateState {
  std::size_t k = 0;
  Point x;
  Point x_prev;
  double s = 0.0;
  // f(x) - f* + ||x - x_prev||^2 / (2s), refreshed after every step.
  double E = 0.0;
  double E0 = 0.0;
  // Set by unscaled_step when 1 - sqrt(s E_k) < 0 at this step.
  bool negative_momentum = false;

  double time() const;
};

enum class OptimizerKind { lydia, lydia_unscaled, avd_nag, hbf, gd };
enum class GradientPoint { extrapolated, current };

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::lydia;
  std::optional<double> a;      // avd_nag only
  std::optional<double> gamma;  // hbf only
  GradientPoint grad_at = GradientPoint::extrapolated;

  static OptimizerSpec lydia(GradientPoint at = GradientPoint::extrapolated);
  static OptimizerSpec lydia_unscaled(GradientPoint at = GradientPoint::extrapolated);
  static OptimizerSpec avd_nag(double a = 3.1);
  static OptimizerSpec hbf(double gamma = 1.0);
  static OptimizerSpec gd();

  /// Throws ConfigError unless each kind-specific parameter is present
  /// exactly when required and valid.
  void validate() const;
};

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(GradientPoint at);
GradientPoint parse_gradient_point(const std::string& name);

struct DiagnosticsRecord {
  std::size_t k = 0;
  double t = 0.0;
  double f_gap = 0.0;
  double E = 0.0;
  double grad_norm = 0.0;
  double step_norm = 0.0;
};

/// f(x) - f* + ||x - x_prev||^2 / (2s)
double discrete_energy(const Objective& obj, std::span<const double> x,
                       std::span<const double> x_prev, double s);

/// The previous point is x0 - sqrt(s) v0; an empty v0 means zero velocity.
IterateState init_state(const Objective& obj, const Point& x0, const Point& v0, double s);

/// sqrt(max(E_k, 0) / E0), the LYDIA damping ratio.
double lydia_beta(const IterateState& state);

/// (k - 1) / (k + a - 1), clamped at 0 for k = 0.
double nag_momentum(std::size_t k, double a);

IterateState lydia_step(const IterateState& state, const Objective& obj,
                        const OptimizerSpec& spec = OptimizerSpec::lydia());
IterateState unscaled_step(const IterateState& state, const Objective& obj,
                           GradientPoint at = GradientPoint::extrapolated);
IterateState avd_nag_step(const IterateState& state, const Objective& obj, double a);
IterateState hbf_step(const IterateState& state, const Objective& obj, double gamma);
IterateState gd_step(const IterateState& state, const Objective& obj);

/// Dispatches on spec.kind.
IterateState step(const IterateState& state, const Objective& obj, const OptimizerSpec& spec);

DiagnosticsRecord make_record(const IterateState& state, const Objective& obj);

/// Which steps `run` keeps. With per_decade > 0 the records are spaced
/// geometrically (about per_decade rows per decade of k) and `stride` is
/// ignored. Step 0 and the final step are always kept.
struct RecordPolicy {
  std::size_t stride = 1;
  std::size_t per_decade = 0;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  IterateState final_state;
  // Index of the first step that produced a non-finite iterate.
  std::optional<std::size_t> diverged_at;
  std::size_t negative_momentum_steps = 0;
  std::optional<std::size_t> first_negative_momentum;
};

/// Called with every consecutive pair of states.
using StepObserver = std::function<void(const IterateState& before, const IterateState& after)>;

/// Deterministic k_max-step run. Divergence stops the run early and is
/// reported through RunResult::diverged_at rather than thrown.
RunResult run(const Objective& obj, const OptimizerSpec& spec, const Point& x0, const Point& v0,
              double s, std::size_t k_max, const RecordPolicy& policy = {},
              const StepObserver& observer = {});

/// f(y - s g(y)) - [f(x) + <g(y), y - x> - s/2 ||g(y)||^2 - s/2 ||g(x) - g(y)||^2].
/// Non-positive for convex L-smooth f and 0 < s <= 1/L.
/// Throws UnsupportedError when the objective has no Lipschitz constant and
/// ConfigError when s is outside (0, 1/L].
double descent_lemma_residual(const Objective& obj, std::span<const double> x,
                              std::span<const double> y, double s);

/// E_{k+1} - [E_k - beta_k (1 - beta_k / 2) ||x_k - x_{k-1}||^2 / s
///            - s/2 ||g(x_k) - g(y_k)||^2]
/// for two consecutive LYDIA states (extrapolated gradient).
double step_decrease_residual(const Objective& obj, const IterateState& before,
                              const IterateState& after);

}  // namespace lydia
