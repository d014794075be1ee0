#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lydia/cli/commands.hpp"
#include "lydia/cli/csv.hpp"
#include "lydia/errors.hpp"

using namespace lydia;
using namespace lydia::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lydia_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const auto c = config_from_json(json::parse(R"({
      "objective": {"name": "contmin", "params": {"eps": 0.25}},
      "optimizers": ["lydia", {"kind": "avd_nag", "a": 3.0}, {"kind": "hbf"}],
      "simulations": [{"system": "AVD", "t0": 2}],
      "k_max": 50, "seed": 9
    })"));
    CHECK(c.objective == "contmin");
    CHECK(*c.params.eps == 0.25);
    REQUIRE(c.optimizers.size() == 3);
    CHECK(*c.optimizers[1].a == 3.0);
    CHECK(*c.optimizers[2].gamma == 1.0);
    CHECK(c.simulations[0].system.kind == SystemKind::avd);
    CHECK(*c.simulations[0].t0 == 2.0);
    CHECK(c.k_max == 50);

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"stepsize": 1})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"optimizers": ["sgd"]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"optimizers": [{"kind": "gd", "a": 2}]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"k_max": "many"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"simulations": [{"system": "LD", "a": 2}]})")), ConfigError);
  }

  TEST_CASE("manifest echoes the resolved config") {
    ExperimentConfig c;
    c.objective = "quartic2d";
    c.optimizers = {OptimizerSpec::gd()};
    const json echo = config_to_json(c);
    CHECK(echo["s"] == 1.0 / 75.0);
    CHECK(echo["x0"] == json::array({2.0, 1.0}));
    CHECK(echo["v0"] == json::array({0.0, 0.0}));
    CHECK(echo["objective"]["name"] == "quartic2d");
    CHECK(config_to_json(config_from_json(echo)) == echo);
  }

  TEST_CASE("validation rejects unusable jobs") {
    ExperimentConfig c;
    CHECK_THROWS_AS(validate(c), ConfigError);  // nothing to run
    c.optimizers = {OptimizerSpec::hbf(1.0)};
    c.s = 4.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c.s = 0.5;
    c.x0 = Point{1.0, 2.0};
    CHECK_THROWS_AS(validate(c), ConfigError);
    c.x0.reset();
    c.simulations = {{System::avd(3.1), 0.0, Integrator::semi_implicit_euler}};
    CHECK_THROWS_AS(validate(c), ConfigError);
  }

  TEST_CASE("run writes one CSV per job and a manifest") {
    const auto dir = scratch("run");
    ExperimentConfig c;
    c.objective = "quadratic";
    c.optimizers = {OptimizerSpec::gd(), OptimizerSpec::lydia(), OptimizerSpec::gd()};
    c.simulations = {{System::ld(), std::nullopt, Integrator::semi_implicit_euler}};
    c.k_max = 10;
    c.s = 0.5;
    c.T = 1.0;
    c.output_dir = dir.string();
    std::ostringstream log;
    CHECK(cmd_run(c, log) == kExitOk);
    CHECK(line_count(dir / "quadratic_gd.csv") == 12);
    CHECK(fs::exists(dir / "quadratic_gd_2.csv"));
    CHECK(fs::exists(dir / "quadratic_lydia.csv"));
    CHECK(fs::exists(dir / "quadratic_LD.csv"));
    CHECK(slurp(dir / "quadratic_gd.csv").rfind("k,t,f_gap,E,grad_norm,step_norm\n", 0) == 0);
    CHECK(slurp(dir / "quadratic_LD.csv").rfind("t,x1,v1,E\n", 0) == 0);

    const json m = json::parse(slurp(dir / "manifest.json"));
    CHECK(m["config"] == config_to_json(c));
    REQUIRE(m["jobs"].size() == 4);
    CHECK(m["jobs"][0]["final_record"]["k"] == 10);
    CHECK(m["jobs"][0].contains("wall_time_s"));
    CHECK(m["jobs"][0].contains("rate_fit"));
    CHECK(m.contains("wall_time_s"));
  }

  TEST_CASE("invalid config leaves no files") {
    const auto dir = scratch("invalid");
    ExperimentConfig c;
    c.objective = "nope";
    c.optimizers = {OptimizerSpec::gd()};
    c.output_dir = dir.string();
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_run(c, log), ConfigError);
    CHECK_FALSE(fs::exists(dir));
  }

  TEST_CASE("divergence keeps the partial CSV") {
    const auto dir = scratch("diverge");
    ExperimentConfig c;
    c.objective = "flat";
    c.optimizers = {OptimizerSpec::gd()};
    c.s = 1.0;
    c.x0 = Point{1.5};
    c.k_max = 100;
    c.output_dir = dir.string();
    std::ostringstream log;
    CHECK(cmd_run(c, log) == kExitFailure);
    CHECK(fs::exists(dir / "flat_gd.csv"));
    const json m = json::parse(slurp(dir / "manifest.json"));
    CHECK(m["jobs"][0].contains("diverged_at"));
  }

  TEST_CASE("runs are byte-identical") {
    ExperimentConfig c;
    c.objective = "quartic2d";
    c.optimizers = {OptimizerSpec::lydia(), OptimizerSpec::avd_nag(3.1), OptimizerSpec::hbf(1.0)};
    c.simulations = {{System::ld(), std::nullopt, Integrator::semi_implicit_euler}};
    c.k_max = 5000;
    std::ostringstream log;
    for (const char* name : {"det_a", "det_b"}) {
      c.output_dir = scratch(name).string();
      REQUIRE(cmd_run(c, log) == kExitOk);
    }
    for (const char* f : {"quartic2d_lydia.csv", "quartic2d_avd_nag.csv", "quartic2d_hbf.csv", "quartic2d_LD.csv"}) {
      const auto a = slurp(fs::temp_directory_path() / "lydia_test_det_a" / f);
      CHECK(!a.empty());
      CHECK(a == slurp(fs::temp_directory_path() / "lydia_test_det_b" / f));
    }
  }

  TEST_CASE("csv round trip and rate fitting") {
    const auto dir = scratch("csv");
    fs::create_directories(dir);
    std::vector<DiagnosticsRecord> recs;
    for (int i = 1; i <= 100; ++i) {
      const double t = std::pow(10.0, i / 25.0);
      recs.push_back({static_cast<std::size_t>(i), t, 0.1 / t, 1.0 / (t * t), 0.0, 0.0});
    }
    {
      std::ofstream out(dir / "d.csv", std::ios::binary);
      write_diagnostics_csv(out, recs);
    }
    const auto cols = read_csv_columns((dir / "d.csv").string());
    CHECK(cols.at("t") .size() == 100);
    CHECK(cols.at("E")[41] == recs[41].E);
    std::ostringstream out;
    CHECK(cmd_rates((dir / "d.csv").string(), "E", 1.0, out) == kExitOk);
    const json j = json::parse(out.str());
    CHECK(std::abs(j["exponent"].get<double>() + 2.0) < 1e-9);
    std::ostringstream gap;
    cmd_rates((dir / "d.csv").string(), "f_gap", 1.0, gap);
    CHECK(json::parse(gap.str())["oscillatory_series"] == true);
    CHECK_THROWS_AS(cmd_rates((dir / "d.csv").string(), "nothing", 1.0, out), ConfigError);
    CHECK_THROWS_AS(read_csv_columns((dir / "missing.csv").string()), ConfigError);
    CHECK(format_number(0.1) == "0.10000000000000001");
  }

  TEST_CASE("check suite passes on the real field") {
    CheckOptions opts;
    opts.lydia_steps = 20000;
    std::ostringstream out;
    CHECK(cmd_check(opts, out) == kExitOk);
    CHECK(out.str().find("FAIL") == std::string::npos);
  }

  TEST_CASE("check suite catches a sign error in the damping") {
    CheckOptions opts;
    opts.lydia_steps = 1000;
    opts.ld_field = [](const Objective& obj, double, std::span<const double> x, std::span<const double> v) {
      Derivative d;
      d.dx.assign(v.begin(), v.end());
      d.dv = obj.gradient(x);
      const double damping = std::sqrt(continuous_energy(obj, x, v));
      for (std::size_t i = 0; i < v.size(); ++i) d.dv[i] = damping * v[i] - d.dv[i];
      return d;
    };
    bool derivative_failed = false;
    for (const auto& row : run_checks(opts))
      if (row.name.rfind("dE/dt identity", 0) == 0 && row.name.find("/E0") != std::string::npos && !row.pass)
        derivative_failed = true;
    CHECK(derivative_failed);
  }

  TEST_CASE("monotonicity audit with zero tolerance on the exact trace") {
    CheckOptions opts;
    opts.monotonicity_tol_rel = 0.0;
    opts.lydia_steps = 1000;
    bool seen = false;
    for (const auto& row : run_checks(opts))
      if (row.name == "LYDIA trace monotone at given tolerance") {
        seen = true;
        CHECK(row.pass);
      }
    CHECK(seen);
  }

  TEST_CASE("figures at reduced scale") {
    const auto dir = scratch("figures");
    std::ostringstream log;
    FigureOptions opts{dir.string(), 1e-3};
    CHECK(cmd_figures("fig2", opts, log) == kExitOk);
    CHECK(cmd_figures("fig1", opts, log) == kExitOk);
    for (const char* f : {"fig2_lydia.csv", "fig2_avd_nag.csv", "fig2_hbf.csv", "fig2_gd.csv", "fig2.svg",
                          "fig2_summary.json", "fig1.svg", "fig1_LD_t0_50.csv", "fig1_summary.json"})
      CHECK_MESSAGE(fs::exists(dir / f), f);
    CHECK(slurp(dir / "fig2.svg").find("<svg") != std::string::npos);
    const json s = json::parse(slurp(dir / "fig1_summary.json"));
    CHECK(s["ld_max_shift_deviation"] == 0.0);
    CHECK(s["avd_gap_ratio"].get<double>() >= 2.0);
    CHECK_THROWS_AS(cmd_figures("fig9", opts, log), ConfigError);
  }

  TEST_CASE("command-line exit codes") {
    const std::string exe = LYDIA_CLI_PATH;
    const auto dir = scratch("exe");
    CHECK(std::system((exe + " list > /dev/null").c_str()) == 0);
    const int bad = std::system((exe + " run --objective nope --optimizer gd -o " + dir.string() + " 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(bad) == kExitConfig);
    CHECK_FALSE(fs::exists(dir));
    const int bad_flag = std::system((exe + " run --no-such-flag 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(bad_flag) == kExitConfig);
    const int ok = std::system((exe + " run --objective quadratic --optimizer gd --k-max 10 -o " + dir.string() + " 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(ok) == kExitOk);
    CHECK(line_count(dir / "quadratic_gd.csv") == 12);
  }
}
