#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "json.hpp"

namespace lydia {

/// Least-squares fit of log10 E = exponent * log10 t + intercept.
struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  // Points inside the window dropped because E fell below the underflow floor.
  std::size_t n_excluded = 0;
};

inline constexpr double kUnderflowFloor = 1e-300;
inline constexpr std::size_t kMinFitPoints = 8;

/// Fits over the final `decades` decades of t (t >= t_max / 10^decades).
/// Points with t <= 0 or E < 1e-300 are skipped. Throws
/// InsufficientDataError with fewer than 8 usable points.
RateFit estimate_rate(std::span<const double> t, std::span<const double> E, double decades = 1.0);

/// First index i with E[i+1] > E[i] (1 + tol_rel) + tol_abs, if any. The
/// default absolute slack ignores subnormal round-off near an exact zero.
std::optional<std::size_t> audit_monotonicity(std::span<const double> E, double tol_rel,
                                              double tol_abs = kUnderflowFloor);

struct RateBoundCheck {
  bool pass = false;
  double margin = 0.0;  // exponent - bound
};

inline constexpr double kRateLowerBound = -2.25;

/// Energy of LD cannot decay faster than t^-2; passes iff exponent >= bound.
RateBoundCheck check_rate_lower_bound(const RateFit& fit, double bound = kRateLowerBound);

void to_json(nlohmann::json& j, const RateFit& fit);
void from_json(const nlohmann::json& j, RateFit& fit);

}  // namespace lydia
