#include "lydia/odesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lydia/errors.hpp"

namespace lydia {

std::string to_string(const System& system) {
  if (system.kind == SystemKind::ld) return "LD";
  char buf[64];
  std::snprintf(buf, sizeof buf, "AVD(a=%g)", system.a);
  return buf;
}

void SimConfig::validate(const Objective& obj) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(T > t0) || !std::isfinite(T)) throw ConfigError("T must exceed t0");
  if (!(t0 >= 0.0)) throw ConfigError("t0 must be non-negative");
  if (dt > T - t0) throw ConfigError("dt must not exceed T - t0");
  if (system.kind == SystemKind::avd) {
    if (!(t0 > 0.0)) throw ConfigError("AVD requires t0 > 0");
    if (!(system.a > 0.0)) throw ConfigError("AVD requires a > 0");
  }
  if (sample_stride < 1) throw ConfigError("sample stride must be at least 1");
  if (x0.size() != obj.dim) throw ConfigError("x0 dimension mismatch");
  if (!v0.empty() && v0.size() != obj.dim) throw ConfigError("v0 dimension mismatch");
  if (!all_finite(x0) || !all_finite(v0)) throw ConfigError("x0 and v0 must be finite");
}

double continuous_energy(const Objective& obj, std::span<const double> x,
                         std::span<const double> v) {
  return obj.gap(x) + 0.5 * squared_norm(v);
}

Derivative rhs(const System& system, const Objective& obj, double t, std::span<const double> x,
               std::span<const double> v) {
  double damping = 0.0;
  if (system.kind == SystemKind::ld) {
    damping = std::sqrt(std::max(continuous_energy(obj, x, v), 0.0));
  } else {
    damping = system.a / t;
  }
  Derivative d;
  d.dx.assign(v.begin(), v.end());
  d.dv = obj.gradient(x);
  for (std::size_t i = 0; i < d.dv.size(); ++i) d.dv[i] = -damping * v[i] - d.dv[i];
  return d;
}

std::vector<TrajectorySample> integrate(const RhsFn& field, const Objective& obj,
                                        const SimConfig& config) {
  config.validate(obj);
  const auto n_steps = static_cast<std::size_t>(std::llround((config.T - config.t0) / config.dt));
  Point x = config.x0;
  Point v = config.v0.empty() ? Point(obj.dim, 0.0) : config.v0;

  std::vector<TrajectorySample> samples;
  samples.reserve(n_steps / config.sample_stride + 2);
  auto sample = [&](std::size_t n) {
    const double t = config.t0 + static_cast<double>(n) * config.dt;
    samples.push_back({t, x, v, continuous_energy(obj, x, v)});
  };
  sample(0);

  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = config.t0 + static_cast<double>(n) * config.dt;
    const Derivative d = field(t, x, v);
    if (config.integrator == Integrator::semi_implicit_euler) {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += config.dt * d.dv[i];
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += config.dt * v[i];
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += config.dt * d.dx[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += config.dt * d.dv[i];
    }
    if (!all_finite(x) || !all_finite(v)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "non-finite state at t=%.17g", t + config.dt);
      throw DivergenceError(buf, n + 1);
    }
    if ((n + 1) % config.sample_stride == 0 || n + 1 == n_steps) sample(n + 1);
  }
  return samples;
}

std::vector<TrajectorySample> simulate(const SimConfig& config, const Objective& obj) {
  const System system = config.system;
  return integrate(
      [&](double t, std::span<const double> x, std::span<const double> v) {
        return rhs(system, obj, t, x, v);
      },
      obj, config);
}

double check_energy_derivative(std::span<const TrajectorySample> traj, const Objective&) {
  if (traj.size() < 3) throw InsufficientDataError("energy derivative check needs 3 samples");
  const double h = traj[1].t - traj[0].t;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double centered = (traj[i + 1].E - traj[i - 1].E) / (2.0 * h);
    const double identity = -std::sqrt(std::max(traj[i].E, 0.0)) * squared_norm(traj[i].v);
    worst = std::max(worst, std::abs(centered - identity));
  }
  return worst;
}

IntegralIdentity integral_identity_terms(std::span<const TrajectorySample> traj) {
  if (traj.size() < 2) throw InsufficientDataError("integral identity needs 2 samples");
  IntegralIdentity out;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double h = traj[i + 1].t - traj[i].t;
    out.kinetic_integral += 0.5 * h * (squared_norm(traj[i].v) + squared_norm(traj[i + 1].v));
  }
  out.sqrt_energy_start = std::sqrt(std::max(traj.front().E, 0.0));
  out.sqrt_energy_end = std::sqrt(std::max(traj.back().E, 0.0));
  out.predicted_sqrt_energy_end = out.sqrt_energy_start - 0.5 * out.kinetic_integral;
  out.residual =
      std::abs(out.kinetic_integral - 2.0 * (out.sqrt_energy_start - out.sqrt_energy_end));
  return out;
}

double check_integral_identity(std::span<const TrajectorySample> traj, const Objective&) {
  return integral_identity_terms(traj).residual;
}

}  // namespace lydia
