#include "lydia/optimizers.hpp"

#include <algorithm>
#include <cmath>

#include "lydia/errors.hpp"

namespace lydia {

double IterateState::time() const { return static_cast<double>(k) * std::sqrt(s); }

OptimizerSpec OptimizerSpec::lydia(GradientPoint at) {
  return {OptimizerKind::lydia, std::nullopt, std::nullopt, at};
}
OptimizerSpec OptimizerSpec::lydia_unscaled(GradientPoint at) {
  return {OptimizerKind::lydia_unscaled, std::nullopt, std::nullopt, at};
}
OptimizerSpec OptimizerSpec::avd_nag(double a) {
  return {OptimizerKind::avd_nag, a, std::nullopt, GradientPoint::extrapolated};
}
OptimizerSpec OptimizerSpec::hbf(double gamma) {
  return {OptimizerKind::hbf, std::nullopt, gamma, GradientPoint::current};
}
OptimizerSpec OptimizerSpec::gd() {
  return {OptimizerKind::gd, std::nullopt, std::nullopt, GradientPoint::current};
}

void OptimizerSpec::validate() const {
  const bool wants_a = kind == OptimizerKind::avd_nag;
  const bool wants_gamma = kind == OptimizerKind::hbf;
  if (a.has_value() != wants_a)
    throw ConfigError(wants_a ? "avd_nag requires parameter a"
                              : "parameter a only applies to avd_nag");
  if (gamma.has_value() != wants_gamma)
    throw ConfigError(wants_gamma ? "hbf requires parameter gamma"
                                  : "parameter gamma only applies to hbf");
  if (a && !(*a > 0.0 && std::isfinite(*a))) throw ConfigError("avd_nag requires a > 0");
  if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma)))
    throw ConfigError("hbf requires gamma > 0");
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::lydia: return "lydia";
    case OptimizerKind::lydia_unscaled: return "lydia_unscaled";
    case OptimizerKind::avd_nag: return "avd_nag";
    case OptimizerKind::hbf: return "hbf";
    case OptimizerKind::gd: return "gd";
  }
  return "unknown";
}

OptimizerKind parse_optimizer_kind(const std::string& name) {
  for (auto kind : {OptimizerKind::lydia, OptimizerKind::lydia_unscaled, OptimizerKind::avd_nag,
                    OptimizerKind::hbf, OptimizerKind::gd})
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown optimizer '" + name + "'");
}

std::string to_string(GradientPoint at) {
  return at == GradientPoint::extrapolated ? "extrapolated" : "current";
}

GradientPoint parse_gradient_point(const std::string& name) {
  if (name == "extrapolated") return GradientPoint::extrapolated;
  if (name == "current") return GradientPoint::current;
  throw ConfigError("grad_at must be 'extrapolated' or 'current', got '" + name + "'");
}

double discrete_energy(const Objective& obj, std::span<const double> x,
                       std::span<const double> x_prev, double s) {
  return obj.gap(x) + squared_distance(x, x_prev) / (2.0 * s);
}

IterateState init_state(const Objective& obj, const Point& x0, const Point& v0, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("step-size s must be positive");
  if (x0.size() != obj.dim)
    throw ConfigError("x0 has dimension " + std::to_string(x0.size()) + ", objective '" +
                      obj.name + "' expects " + std::to_string(obj.dim));
  if (!v0.empty() && v0.size() != obj.dim) throw ConfigError("v0 dimension mismatch");
  if (!all_finite(x0) || !all_finite(v0)) throw ConfigError("x0 and v0 must be finite");

  IterateState state;
  state.s = s;
  state.x = x0;
  state.x_prev = x0;
  if (!v0.empty()) {
    const double root_s = std::sqrt(s);
    for (std::size_t i = 0; i < x0.size(); ++i) state.x_prev[i] = x0[i] - root_s * v0[i];
  }
  state.E = discrete_energy(obj, state.x, state.x_prev, s);
  state.E0 = state.E;
  return state;
}

double lydia_beta(const IterateState& state) {
  if (state.E0 <= 0.0) return 0.0;
  return std::sqrt(std::max(state.E, 0.0) / state.E0);
}

double nag_momentum(std::size_t k, double a) {
  if (k == 0) return 0.0;
  const double kk = static_cast<double>(k);
  return (kk - 1.0) / (kk + a - 1.0);
}

namespace {

// y = x + momentum (x - x_prev); x_next = y - s grad(y or x).
IterateState advance(const IterateState& state, const Objective& obj, double momentum,
                     GradientPoint at) {
  const std::size_t n = state.x.size();
  Point y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = state.x[i] + momentum * (state.x[i] - state.x_prev[i]);
  const Point g = obj.gradient(at == GradientPoint::extrapolated ? std::span<const double>(y)
                                                                 : std::span<const double>(state.x));
  IterateState next;
  next.k = state.k + 1;
  next.s = state.s;
  next.E0 = state.E0;
  next.x = std::move(y);
  for (std::size_t i = 0; i < n; ++i) next.x[i] -= state.s * g[i];
  next.x_prev = state.x;
  next.E = discrete_energy(obj, next.x, next.x_prev, next.s);
  return next;
}

}  // namespace

IterateState lydia_step(const IterateState& state, const Objective& obj, const OptimizerSpec& spec) {
  if (state.E0 <= 0.0) {
    // Started at a stationary minimum.
    IterateState next = state;
    next.k = state.k + 1;
    next.negative_momentum = false;
    return next;
  }
  return advance(state, obj, 1.0 - lydia_beta(state), spec.grad_at);
}

IterateState unscaled_step(const IterateState& state, const Objective& obj, GradientPoint at) {
  const double momentum = 1.0 - std::sqrt(state.s) * std::sqrt(std::max(state.E, 0.0));
  IterateState next = advance(state, obj, momentum, at);
  next.negative_momentum = momentum < 0.0;
  return next;
}

IterateState avd_nag_step(const IterateState& state, const Objective& obj, double a) {
  return advance(state, obj, nag_momentum(state.k, a), GradientPoint::extrapolated);
}

IterateState hbf_step(const IterateState& state, const Objective& obj, double gamma) {
  const double damping = std::sqrt(state.s) * gamma;
  if (damping >= 2.0) throw ConfigError("hbf requires sqrt(s) * gamma < 2");
  return advance(state, obj, 1.0 - damping, GradientPoint::current);
}

IterateState gd_step(const IterateState& state, const Objective& obj) {
  return advance(state, obj, 0.0, GradientPoint::current);
}

IterateState step(const IterateState& state, const Objective& obj, const OptimizerSpec& spec) {
  switch (spec.kind) {
    case OptimizerKind::lydia: return lydia_step(state, obj, spec);
    case OptimizerKind::lydia_unscaled: return unscaled_step(state, obj, spec.grad_at);
    case OptimizerKind::avd_nag: return avd_nag_step(state, obj, spec.a.value_or(3.1));
    case OptimizerKind::hbf: return hbf_step(state, obj, spec.gamma.value_or(1.0));
    case OptimizerKind::gd: return gd_step(state, obj);
  }
  throw ConfigError("unhandled optimizer kind");
}

DiagnosticsRecord make_record(const IterateState& state, const Objective& obj) {
  DiagnosticsRecord rec;
  rec.k = state.k;
  rec.t = state.time();
  rec.f_gap = obj.gap(state.x);
  rec.E = state.E;
  rec.grad_norm = norm(obj.gradient(state.x));
  rec.step_norm = distance(state.x, state.x_prev);
  return rec;
}

RunResult run(const Objective& obj, const OptimizerSpec& spec, const Point& x0, const Point& v0,
              double s, std::size_t k_max, const RecordPolicy& policy,
              const StepObserver& observer) {
  spec.validate();
  if (k_max < 1) throw ConfigError("k_max must be at least 1");
  if (policy.stride < 1) throw ConfigError("record stride must be at least 1");
  if (spec.kind == OptimizerKind::hbf && std::sqrt(s) * *spec.gamma >= 2.0)
    throw ConfigError("hbf requires sqrt(s) * gamma < 2");

  RunResult result;
  IterateState state = init_state(obj, x0, v0, s);
  result.records.push_back(make_record(state, obj));

  const double geo_ratio =
      policy.per_decade > 0 ? std::pow(10.0, 1.0 / static_cast<double>(policy.per_decade)) : 0.0;
  std::size_t next_geo = 1;
  auto wanted = [&](std::size_t k) {
    if (policy.per_decade == 0) return k % policy.stride == 0;
    if (k < next_geo) return false;
    next_geo = std::max(k + 1, static_cast<std::size_t>(std::ceil(static_cast<double>(k) * geo_ratio)));
    return true;
  };

  for (std::size_t k = 0; k < k_max; ++k) {
    IterateState next = step(state, obj, spec);
    if (!all_finite(next.x) || !std::isfinite(next.E)) {
      result.diverged_at = next.k;
      break;
    }
    if (next.negative_momentum) {
      if (!result.first_negative_momentum) result.first_negative_momentum = next.k;
      ++result.negative_momentum_steps;
    }
    if (observer) observer(state, next);
    state = std::move(next);
    if (wanted(state.k) || state.k == k_max) result.records.push_back(make_record(state, obj));
  }
  if (result.diverged_at && result.records.back().k != state.k)
    result.records.push_back(make_record(state, obj));
  result.final_state = std::move(state);
  return result;
}

double descent_lemma_residual(const Objective& obj, std::span<const double> x,
                              std::span<const double> y, double s) {
  if (!obj.lipschitz) throw UnsupportedError("objective '" + obj.name + "' has no Lipschitz constant");
  if (!(s > 0.0) || s > 1.0 / *obj.lipschitz * (1.0 + 1e-12))
    throw ConfigError("descent lemma requires 0 < s <= 1/L");
  const Point gx = obj.gradient(x);
  const Point gy = obj.gradient(y);
  Point stepped(y.begin(), y.end());
  for (std::size_t i = 0; i < stepped.size(); ++i) stepped[i] -= s * gy[i];
  double inner = 0.0;
  for (std::size_t i = 0; i < stepped.size(); ++i) inner += gy[i] * (y[i] - x[i]);
  const double bound = obj.value(x) + inner - 0.5 * s * squared_norm(gy) -
                       0.5 * s * squared_distance(gx, gy);
  return obj.value(stepped) - bound;
}

double step_decrease_residual(const Objective& obj, const IterateState& before,
                              const IterateState& after) {
  if (before.E0 <= 0.0) return after.E - before.E;
  const double beta = lydia_beta(before);
  const std::size_t n = before.x.size();
  Point y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = before.x[i] + (1.0 - beta) * (before.x[i] - before.x_prev[i]);
  const double moved = squared_distance(before.x, before.x_prev);
  const double grad_gap = squared_distance(obj.gradient(before.x), obj.gradient(y));
  const double s = before.s;
  const double bound = before.E - beta * (1.0 - 0.5 * beta) * moved / s - 0.5 * s * grad_gap;
  return after.E - bound;
}

}  // namespace lydia
