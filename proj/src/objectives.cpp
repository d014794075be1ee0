#include "lydia/objectives.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>

#include "lydia/errors.hpp"

namespace lydia {

double Objective::value(std::span<const double> x) const {
  const double v = f(x);
  assert(!(v < f_star) && "objective evaluated below its infimum");
  return v;
}

Point Objective::gradient(std::span<const double> x) const { return grad(x); }

const std::vector<std::string>& objective_names() {
  static const std::vector<std::string> names{"flat",      "nonkl",    "uneven",
                                              "contmin",   "quartic2d", "quadratic"};
  return names;
}

namespace {

constexpr double kNonKlCutoff = 1e-6;

Objective make_flat() {
  Objective obj;
  obj.name = "flat";
  obj.f = [](std::span<const double> x) { return std::pow(x[0], 24); };
  obj.grad = [](std::span<const double> x) { return Point{24.0 * std::pow(x[0], 23)}; };
  obj.box_half_width = 1.5;
  obj.lipschitz = 24.0 * 23.0 * std::pow(obj.box_half_width, 22);
  obj.default_start = {1.2};
  return obj;
}

// max over u = 1/x^2 > 0 of |f''| with f'' = e^{-u} (4u^3 - 6u^2). The
// stationary points of that expression are the roots of 2u^2 - 9u + 6.
double nonkl_curvature_bound(double half_width) {
  auto curvature = [](double u) { return std::exp(-u) * (4.0 * u * u * u - 6.0 * u * u); };
  const double u_min = 1.0 / (half_width * half_width);
  double best = std::abs(curvature(u_min));
  for (double u : {(9.0 + std::sqrt(33.0)) / 4.0, (9.0 - std::sqrt(33.0)) / 4.0})
    if (u >= u_min) best = std::max(best, std::abs(curvature(u)));
  return best;
}

Objective make_nonkl() {
  Objective obj;
  obj.name = "nonkl";
  obj.f = [](std::span<const double> x) {
    const double t = x[0];
    if (std::abs(t) < kNonKlCutoff) return 0.0;
    return std::exp(-1.0 / (t * t));
  };
  obj.grad = [](std::span<const double> x) {
    const double t = x[0];
    if (std::abs(t) < kNonKlCutoff) return Point{0.0};
    return Point{2.0 / (t * t * t) * std::exp(-1.0 / (t * t))};
  };
  obj.box_half_width = 1.5;
  obj.lipschitz = nonkl_curvature_bound(obj.box_half_width);
  obj.default_start = {1.0};
  obj.seams = {0.0};
  return obj;
}

Objective make_uneven() {
  Objective obj;
  obj.name = "uneven";
  obj.f = [](std::span<const double> x) {
    const double t = x[0];
    return t > 0.0 ? t * t * t : t * t;
  };
  obj.grad = [](std::span<const double> x) {
    const double t = x[0];
    return Point{t > 0.0 ? 3.0 * t * t : 2.0 * t};
  };
  obj.box_half_width = 1.5;
  obj.lipschitz = std::max(2.0, 6.0 * obj.box_half_width);
  obj.default_start = {1.0};
  obj.seams = {0.0};
  return obj;
}

Objective make_contmin(double eps) {
  Objective obj;
  obj.name = "contmin";
  obj.f = [eps](std::span<const double> x) {
    const double t = x[0];
    if (t > eps) return (t - eps) * (t - eps);
    if (t < -eps) return (t + eps) * (t + eps);
    return 0.0;
  };
  obj.grad = [eps](std::span<const double> x) {
    const double t = x[0];
    if (t > eps) return Point{2.0 * (t - eps)};
    if (t < -eps) return Point{2.0 * (t + eps)};
    return Point{0.0};
  };
  obj.box_half_width = 3.0;
  obj.lipschitz = 2.0;
  obj.default_start = {2.0};
  obj.seams = {-eps, eps};
  return obj;
}

Objective make_quartic2d() {
  Objective obj;
  obj.name = "quartic2d";
  obj.dim = 2;
  obj.f = [](std::span<const double> x) {
    const double a = x[0] * x[0];
    const double b = x[1] * x[1];
    return a * a + 0.1 * b * b;
  };
  obj.grad = [](std::span<const double> x) {
    return Point{4.0 * x[0] * x[0] * x[0], 0.4 * x[1] * x[1] * x[1]};
  };
  obj.box_half_width = 2.5;
  obj.lipschitz = 12.0 * obj.box_half_width * obj.box_half_width;
  obj.default_start = {2.0, 1.0};
  return obj;
}

Objective make_quadratic(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs = {1.0};
  for (double c : coeffs)
    if (!(c > 0.0) || !std::isfinite(c))
      throw ConfigError("quadratic coefficients must be finite and positive");
  Objective obj;
  obj.name = "quadratic";
  obj.dim = coeffs.size();
  obj.f = [coeffs](std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc += coeffs[i] * x[i] * x[i];
    return 0.5 * acc;
  };
  obj.grad = [coeffs](std::span<const double> x) {
    Point g(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) g[i] = coeffs[i] * x[i];
    return g;
  };
  obj.box_half_width = 2.0;
  obj.lipschitz = *std::max_element(coeffs.begin(), coeffs.end());
  obj.default_start = Point(coeffs.size(), 1.0);
  return obj;
}

}  // namespace

Objective build_objective(const std::string& name, const ObjectiveParams& params) {
  if (name == "flat") return make_flat();
  if (name == "nonkl") return make_nonkl();
  if (name == "uneven") return make_uneven();
  if (name == "contmin") {
    const double eps = params.eps.value_or(0.5);
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("contmin requires eps > 0");
    return make_contmin(eps);
  }
  if (name == "quartic2d") return make_quartic2d();
  if (name == "quadratic") return make_quadratic(params.coeffs);
  throw ConfigError("unknown objective '" + name + "'");
}

double check_gradient(const Objective& obj, std::span<const double> x, double h) {
  const Point analytic = obj.gradient(x);
  Point probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double up = obj.f(probe);
    probe[i] = xi - h;
    const double down = obj.f(probe);
    probe[i] = xi;
    const double central = (up - down) / (2.0 * h);
    const double err = std::abs(central - analytic[i]) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

bool near_seam(const Objective& obj, std::span<const double> x, double h) {
  for (double xi : x)
    for (double seam : obj.seams)
      if (std::abs(xi - seam) <= h) return true;
  return false;
}

double max_sampled_gradient_error(const Objective& obj, std::size_t n, std::uint64_t seed,
                                  double h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-obj.box_half_width, obj.box_half_width);
  double worst = 0.0;
  Point x(obj.dim);
  std::size_t accepted = 0;
  while (accepted < n) {
    for (double& xi : x) xi = coord(rng);
    if (near_seam(obj, x, 10.0 * h)) continue;
    worst = std::max(worst, check_gradient(obj, x, h));
    ++accepted;
  }
  return worst;
}

}  // namespace lydia
