#include "lydia/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lydia/errors.hpp"

namespace lydia {

RateFit estimate_rate(std::span<const double> t, std::span<const double> E, double decades) {
  if (t.size() != E.size()) throw InsufficientDataError("t and E differ in length");
  if (!(decades > 0.0)) throw InsufficientDataError("window must span a positive number of decades");
  double t_max = 0.0;
  for (double ti : t) t_max = std::max(t_max, ti);
  if (!(t_max > 0.0)) throw InsufficientDataError("series has no positive times");
  const double t_cut = t_max / std::pow(10.0, decades);

  RateFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || t[i] < t_cut) continue;
    if (!(E[i] >= kUnderflowFloor) || !std::isfinite(E[i])) {
      ++fit.n_excluded;
      continue;
    }
    lx.push_back(std::log10(t[i]));
    ly.push_back(std::log10(E[i]));
  }
  if (lx.size() < kMinFitPoints)
    throw InsufficientDataError("rate fit needs at least 8 usable points, got " +
                                std::to_string(lx.size()));

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("rate fit window has a single distinct time");
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.t_lo = std::pow(10.0, *std::min_element(lx.begin(), lx.end()));
  fit.t_hi = std::pow(10.0, *std::max_element(lx.begin(), lx.end()));
  fit.n_points = lx.size();
  return fit;
}

std::optional<std::size_t> audit_monotonicity(std::span<const double> E, double tol_rel,
                                              double tol_abs) {
  for (std::size_t i = 0; i + 1 < E.size(); ++i)
    if (E[i + 1] > E[i] * (1.0 + tol_rel) + tol_abs) return i;
  return std::nullopt;
}

RateBoundCheck check_rate_lower_bound(const RateFit& fit, double bound) {
  return {fit.exponent >= bound, fit.exponent - bound};
}

void to_json(nlohmann::json& j, const RateFit& fit) {
  j = nlohmann::json{{"exponent", fit.exponent},
                     {"intercept", fit.intercept},
                     {"window", {fit.t_lo, fit.t_hi}},
                     {"r_squared", fit.r_squared},
                     {"n_points", fit.n_points},
                     {"n_excluded", fit.n_excluded}};
}

void from_json(const nlohmann::json& j, RateFit& fit) {
  fit.exponent = j.at("exponent").get<double>();
  fit.intercept = j.at("intercept").get<double>();
  fit.t_lo = j.at("window").at(0).get<double>();
  fit.t_hi = j.at("window").at(1).get<double>();
  fit.r_squared = j.at("r_squared").get<double>();
  fit.n_points = j.at("n_points").get<std::size_t>();
  fit.n_excluded = j.value("n_excluded", std::size_t{0});
}

}  // namespace lydia
