#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lydia/objectives.hpp"

namespace lydia {

enum class SystemKind { ld, avd };

/// LD:  x'' + sqrt(E) x' + grad f(x) = 0
/// AVD: x'' + (a / t) x' + grad f(x) = 0
struct System {
  SystemKind kind = SystemKind::ld;
  double a = 3.1;

  static System ld() { return {SystemKind::ld, 0.0}; }
  static System avd(double a) { return {SystemKind::avd, a}; }
};

std::string to_string(const System& system);

enum class Integrator {
  semi_implicit_euler,  // velocity first, position uses the new velocity
  explicit_euler,
};

struct SimConfig {
  System system;
  double t0 = 0.0;
  double T = 10.0;
  double dt = 1e-3;
  Point x0;
  Point v0;  // empty means zero
  std::size_t sample_stride = 1;
  Integrator integrator = Integrator::semi_implicit_euler;

  /// Throws ConfigError when the configuration is unusable for `obj`.
  void validate(const Objective& obj) const;
};

struct TrajectorySample {
  double t = 0.0;
  Point x;
  Point v;
  double E = 0.0;
};

struct Derivative {
  Point dx;
  Point dv;
};

/// f(x) - f* + ||v||^2 / 2
double continuous_energy(const Objective& obj, std::span<const double> x,
                         std::span<const double> v);

/// First-order form of the second-order dynamics: (x, v)' = (v, -damping v - grad f(x)).
Derivative rhs(const System& system, const Objective& obj, double t, std::span<const double> x,
               std::span<const double> v);

using RhsFn = std::function<Derivative(double t, std::span<const double> x,
                                       std::span<const double> v)>;

/// Fixed-step integration of an arbitrary first-order right-hand side. Time
/// is t0 + n dt; samples are taken every sample_stride steps and at the end.
/// Throws DivergenceError on a non-finite state.
std::vector<TrajectorySample> integrate(const RhsFn& field, const Objective& obj,
                                        const SimConfig& config);

std::vector<TrajectorySample> simulate(const SimConfig& config, const Objective& obj);

/// Max over interior samples of |(E_{i+1} - E_{i-1}) / (2h) + sqrt(E_i) ||v_i||^2|.
double check_energy_derivative(std::span<const TrajectorySample> traj, const Objective& obj);

struct IntegralIdentity {
  double kinetic_integral = 0.0;  // trapezoidal integral of ||v||^2
  double sqrt_energy_start = 0.0;
  double sqrt_energy_end = 0.0;
  // sqrt(E(t0)) - kinetic_integral / 2
  double predicted_sqrt_energy_end = 0.0;
  // |kinetic_integral - 2 (sqrt(E(t0)) - sqrt(E(T)))|
  double residual = 0.0;
};

IntegralIdentity integral_identity_terms(std::span<const TrajectorySample> traj);

double check_integral_identity(std::span<const TrajectorySample> traj, const Objective& obj);

}  // namespace lydia
