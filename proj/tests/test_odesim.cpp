#include <cmath>

#include "doctest.h"
#include "lydia/analysis.hpp"
#include "lydia/errors.hpp"
#include "lydia/odesim.hpp"

using namespace lydia;
using doctest::Approx;

namespace {
const Objective half_square = build_objective("quadratic");

SimConfig ld_config(const Point& x0, double T, double dt, std::size_t stride = 1) {
  SimConfig c;
  c.system = System::ld();
  c.T = T;
  c.dt = dt;
  c.x0 = x0;
  c.sample_stride = stride;
  return c;
}
}  // namespace

TEST_SUITE("odesim") {
  TEST_CASE("right-hand side") {
    const auto eq = rhs(System::ld(), half_square, 0.0, Point{0.0}, Point{0.0});
    CHECK(eq.dx[0] == 0.0);
    CHECK(eq.dv[0] == 0.0);
    const auto ld = rhs(System::ld(), half_square, 0.0, Point{0.0}, Point{1.0});
    CHECK(ld.dx[0] == 1.0);
    CHECK(ld.dv[0] == Approx(-0.707107).epsilon(1e-6));
    CHECK(ld.dv[0] == -std::sqrt(0.5));
    const auto avd = rhs(System::avd(3.0), half_square, 1.0, Point{1.0}, Point{0.0});
    CHECK(avd.dv[0] == -1.0);
    const auto avd2 = rhs(System::avd(3.0), half_square, 2.0, Point{0.0}, Point{1.0});
    CHECK(avd2.dv[0] == -1.5);
  }

  TEST_CASE("equilibrium stays put") {
    const auto traj = simulate(ld_config({0.0}, 5.0, 1e-2), half_square);
    for (const auto& p : traj) {
      CHECK(p.x[0] == 0.0);
      CHECK(p.E == 0.0);
    }
    CHECK(check_energy_derivative(traj, half_square) == 0.0);
    CHECK(check_integral_identity(traj, half_square) == 0.0);
  }

  TEST_CASE("sampling grid") {
    const auto traj = simulate(ld_config({1.0}, 1.0, 1e-3, 300), half_square);
    std::vector<double> ts;
    for (const auto& p : traj) ts.push_back(p.t);
    REQUIRE(ts.size() == 5);
    CHECK(ts[1] == Approx(0.3));
    CHECK(ts.back() == Approx(1.0));
  }

  TEST_CASE("energy decreases along LD") {
    for (double T : {0.01, 1.0, 10.0}) {
      const auto traj = simulate(ld_config({1.0}, T, 1e-3), half_square);
      CHECK(traj.back().E < traj.front().E);
    }
    for (auto integrator : {Integrator::semi_implicit_euler, Integrator::explicit_euler}) {
      auto cfg = ld_config({2.0, 1.0}, 10.0, 1e-3);
      cfg.integrator = integrator;
      const auto obj = build_objective("quartic2d");
      const auto traj = simulate(cfg, obj);
      // per-step slack c dt^2 with c = |grad f(x0)|^2
      const double slack = squared_norm(obj.gradient(cfg.x0)) * cfg.dt * cfg.dt;
      for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj[i].E <= traj[i - 1].E + slack);
    }
  }

  TEST_CASE("energy identities converge at first order") {
    const auto coarse = simulate(ld_config({1.0}, 10.0, 1e-3), half_square);
    const auto fine = simulate(ld_config({1.0}, 10.0, 5e-4), half_square);
    const double d_ratio = check_energy_derivative(coarse, half_square) / check_energy_derivative(fine, half_square);
    const double i_ratio = check_integral_identity(coarse, half_square) / check_integral_identity(fine, half_square);
    CHECK(d_ratio == Approx(2.0).epsilon(0.15));
    CHECK(i_ratio == Approx(2.0).epsilon(0.15));
    CHECK(check_integral_identity(coarse, half_square) <= 1e-2 * std::sqrt(coarse.front().E));

    const auto terms = integral_identity_terms(coarse);
    CHECK(std::abs(terms.predicted_sqrt_energy_end - terms.sqrt_energy_end) == Approx(0.5 * terms.residual));
  }

  TEST_CASE("the identity is specific to LD") {
    double prev = 0.0;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
      SimConfig cfg = ld_config({1.0}, 11.0, dt);
      cfg.system = System::avd(3.0);
      cfg.t0 = 1.0;
      const double r = check_energy_derivative(simulate(cfg, half_square), half_square);
      CHECK(r > 0.05);
      if (prev > 0.0) CHECK(r == Approx(prev).epsilon(0.05));
      prev = r;
    }
  }

  TEST_CASE("LD is time-shift invariant, AVD is not") {
    const auto obj = build_objective("quartic2d");
    auto a = ld_config(obj.default_start, 20.0, 1e-3, 10);
    auto b = a;
    b.t0 = 50.0;
    b.T = 70.0;
    const auto ta = simulate(a, obj), tb = simulate(b, obj);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
      CHECK(ta[i].x == tb[i].x);
      CHECK(ta[i].v == tb[i].v);
    }
    a.system = b.system = System::avd(3.1);
    a.t0 = 1.0;
    a.T = 21.0;
    const auto va = simulate(a, obj), vb = simulate(b, obj);
    CHECK(std::abs(va[1000].x[0] - vb[1000].x[0]) > 1e-2);
  }

  TEST_CASE("energy vanishes on long horizons") {
    for (const auto& name : objective_names()) {
      const auto obj = build_objective(name);
      const auto traj = simulate(ld_config(obj.default_start, 1e4, 1e-2, 1000), obj);
      CHECK_MESSAGE(traj.back().E <= 1e-3 * traj.front().E, name);
    }
  }

  TEST_CASE("LD energy decays no faster than t^-2") {
    for (const char* name : {"flat", "nonkl", "uneven", "contmin", "quartic2d"}) {
      const auto obj = build_objective(name);
      const auto traj = simulate(ld_config(obj.default_start, 1e4, 1e-2, 100), obj);
      std::vector<double> t, E;
      for (const auto& p : traj) {
        t.push_back(p.t);
        E.push_back(p.E);
      }
      const auto fit = estimate_rate(t, E);
      CHECK_MESSAGE(check_rate_lower_bound(fit).pass, name, " exponent ", fit.exponent);
    }
  }

  TEST_CASE("configuration errors") {
    auto cfg = ld_config({1.0}, 1.0, 1e-3);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(simulate(cfg, half_square), ConfigError);
    cfg = ld_config({1.0}, 1.0, 2.0);
    CHECK_THROWS_AS(simulate(cfg, half_square), ConfigError);
    cfg = ld_config({1.0}, 1.0, 1e-3);
    cfg.system = System::avd(3.0);
    CHECK_THROWS_AS(simulate(cfg, half_square), ConfigError);
    cfg = ld_config({1.0, 2.0}, 1.0, 1e-3);
    CHECK_THROWS_AS(simulate(cfg, half_square), ConfigError);
  }

  TEST_CASE("divergence names the failing time") {
    const auto flat = build_objective("flat");
    try {
      simulate(ld_config({1.5}, 1.0, 0.1), flat);
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.step() >= 1);
      CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
  }
}
