#include <cmath>

#include "doctest.h"
#include "lydia/analysis.hpp"
#include "lydia/errors.hpp"

using namespace lydia;
using doctest::Approx;

namespace {
std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  return t;
}
}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("exact power laws") {
    const auto t = log_grid(10.0, 1000.0, 64);
    for (double p : {-0.5, -1.0, -1.5, -2.0})
      for (double c : {0.1, 1.0, 10.0}) {
        std::vector<double> E;
        for (double ti : t) E.push_back(c * std::pow(ti, p));
        const auto fit = estimate_rate(t, E, 2.0);
        CHECK(std::abs(fit.exponent - p) <= 1e-9);
        CHECK(fit.intercept == Approx(std::log10(c)).epsilon(1e-9));
        CHECK(fit.r_squared == Approx(1.0).epsilon(1e-12));
        CHECK(fit.n_points == 64);
      }
  }

  TEST_CASE("default window is the final decade") {
    const auto t = log_grid(10.0, 1000.0, 64);
    std::vector<double> E;
    for (double ti : t) E.push_back(5.0 / ti);
    const auto fit = estimate_rate(t, E);
    CHECK(fit.exponent == Approx(-1.0).epsilon(1e-12));
    CHECK(fit.intercept == Approx(std::log10(5.0)).epsilon(1e-12));
    CHECK(fit.t_lo >= 100.0 - 1e-9);
    CHECK(fit.t_hi == Approx(1000.0));
    CHECK(fit.n_points == 32);
  }

  TEST_CASE("scale equivariance") {
    const auto t = log_grid(1.0, 1e4, 200);
    std::vector<double> E, scaled;
    for (double ti : t) {
      const double e = std::pow(ti, -1.7) * (1.0 + 0.3 * std::sin(ti));
      E.push_back(e);
      scaled.push_back(42.0 * e);
    }
    const auto a = estimate_rate(t, E), b = estimate_rate(t, scaled);
    CHECK(std::abs(a.exponent - b.exponent) <= 1e-12);
    CHECK(b.intercept - a.intercept == Approx(std::log10(42.0)));
  }

  TEST_CASE("underflowed points are excluded") {
    const auto t = log_grid(10.0, 1000.0, 40);
    std::vector<double> E;
    for (double ti : t) E.push_back(1.0 / (ti * ti));
    E[35] = 0.0;
    E[36] = 1e-320;
    const auto fit = estimate_rate(t, E);
    CHECK(fit.n_excluded == 2);
    CHECK(fit.exponent == Approx(-2.0).epsilon(1e-9));
    std::vector<double> zeros(40, 0.0);
    CHECK_THROWS_AS(estimate_rate(t, zeros), InsufficientDataError);
    CHECK_THROWS_AS(estimate_rate(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}), InsufficientDataError);
  }

  TEST_CASE("monotonicity audit") {
    CHECK_FALSE(audit_monotonicity(std::vector<double>{5, 4, 3, 2, 1, 0, 0}, 0.0).has_value());
    std::vector<double> uptick{10, 9, 8, 7, 6, 5, 4, 3, 3.5, 2};
    CHECK(audit_monotonicity(uptick, 1e-12) == 7u);
    CHECK_FALSE(audit_monotonicity(uptick, 0.2).has_value());
    CHECK(audit_monotonicity(std::vector<double>{1.0, 1.0 + 1e-10}, 1e-12) == 0u);
    CHECK_FALSE(audit_monotonicity(std::vector<double>{1.0, 1.0 + 1e-13}, 1e-12).has_value());
    CHECK_FALSE(audit_monotonicity(std::vector<double>{0.0, 5e-324}, 0.0).has_value());
    CHECK(audit_monotonicity(std::vector<double>{0.0, 5e-324}, 0.0, 0.0) == 0u);
  }

  TEST_CASE("rate lower bound") {
    RateFit fit;
    fit.exponent = -1.95;
    auto check = check_rate_lower_bound(fit);
    CHECK(check.pass);
    CHECK(check.margin == Approx(0.30));
    fit.exponent = -2.6;
    CHECK_FALSE(check_rate_lower_bound(fit).pass);
  }

  TEST_CASE("json round trip") {
    RateFit fit{-2.01, 0.3, 10.0, 100.0, 0.999, 50, 1};
    const nlohmann::json j = fit;
    CHECK(j.at("window") == nlohmann::json::array({10.0, 100.0}));
    CHECK(j.contains("exponent"));
    CHECK(j.contains("r_squared"));
    CHECK(j.contains("n_points"));
    const auto back = j.get<RateFit>();
    CHECK(back.exponent == fit.exponent);
    CHECK(back.t_hi == fit.t_hi);
    CHECK(back.n_points == fit.n_points);
  }
}
