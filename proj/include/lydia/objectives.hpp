#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lydia/vector_ops.hpp"

namespace lydia {

/// Smooth convex test function with analytic gradient and known infimum.
///
/// Instances are immutable once built and may be shared across threads.
/// `lipschitz` is the gradient Lipschitz constant on the standard test box
/// [-box_half_width, box_half_width]^dim; for functions without a global
/// constant (flat, uneven) it is the local value on that box.
struct Objective {
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<Point(std::span<const double>)>;

  std::string name;
  std::size_t dim = 1;
  ValueFn f;
  GradientFn grad;
  double f_star = 0.0;
  std::optional<double> lipschitz;
  double box_half_width = 1.0;
  Point default_start;
  // Coordinate values where the function switches branch. Finite
  // differences straddling these are not meaningful.
  std::vector<double> seams;

  double value(std::span<const double> x) const;
  Point gradient(std::span<const double> x) const;
  double gap(std::span<const double> x) const { return value(x) - f_star; }
};

struct ObjectiveParams {
  // contmin valley half-width
  std::optional<double> eps;
  // quadratic: f(x) = 1/2 sum_i coeffs[i] * x_i^2
  std::vector<double> coeffs;
};

/// Registered names: flat, nonkl, uneven, contmin, quartic2d, quadratic.
const std::vector<std::string>& objective_names();

/// Throws ConfigError on unknown names or invalid parameters.
Objective build_objective(const std::string& name, const ObjectiveParams& params = {});

/// Max over coordinates of |central difference - analytic| / max(1, |analytic|).
double check_gradient(const Objective& obj, std::span<const double> x, double h);

/// True when some coordinate of x lies within `h` of a branch seam.
bool near_seam(const Objective& obj, std::span<const double> x, double h);

/// Largest check_gradient error over `n` points drawn uniformly from the
/// standard box, skipping points within 10h of a seam.
double max_sampled_gradient_error(const Objective& obj, std::size_t n, std::uint64_t seed,
                                  double h = 1e-6);

}  // namespace lydia
