#include "lydia/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "json.hpp"
#include "lydia/analysis.hpp"
#include "lydia/cli/csv.hpp"
#include "lydia/cli/svg.hpp"
#include "lydia/errors.hpp"

namespace lydia::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json record_to_json(const DiagnosticsRecord& r) {
  return json{{"k", r.k},         {"t", r.t},
              {"f_gap", r.f_gap}, {"E", r.E},
              {"grad_norm", r.grad_norm}, {"step_norm", r.step_norm}};
}

// Fit of `values` against t, or the reason it could not be fitted.
json try_fit(const std::vector<double>& t, const std::vector<double>& values, double decades) {
  try {
    return json(estimate_rate(t, values, decades));
  } catch (const InsufficientDataError& e) {
    return json{{"error", e.what()}};
  }
}

std::vector<double> column(std::span<const DiagnosticsRecord> records,
                           double DiagnosticsRecord::*field) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.*field);
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string unique_name(std::set<std::string>& used, const std::string& base) {
  std::string name = base;
  for (int i = 2; used.count(name); ++i) name = base + "_" + std::to_string(i);
  used.insert(name);
  return name;
}

std::string method_label(const OptimizerSpec& spec) {
  char buf[64];
  switch (spec.kind) {
    case OptimizerKind::lydia: return "LD (LYDIA)";
    case OptimizerKind::lydia_unscaled: return "LD (unscaled)";
    case OptimizerKind::avd_nag:
      std::snprintf(buf, sizeof buf, "AVD (NAG, a=%g)", *spec.a);
      return buf;
    case OptimizerKind::hbf:
      std::snprintf(buf, sizeof buf, "HBF (gamma=%g)", *spec.gamma);
      return buf;
    case OptimizerKind::gd: return "GD";
  }
  return "?";
}

}  // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();
  const Objective obj = build_objective(config.objective, config.params);
  const double s = config.s.value_or(default_step_size(obj));
  const Point x0 = config.x0.value_or(obj.default_start);
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);

  struct Outcome {
    json summary;
    bool failed = false;
  };
  std::set<std::string> used;
  std::vector<std::future<Outcome>> jobs;

  for (const auto& spec : config.optimizers) {
    const std::string file = unique_name(used, obj.name + "_" + to_string(spec.kind)) + ".csv";
    jobs.push_back(std::async(std::launch::async, [&, spec, file] {
      const auto t_start = std::chrono::steady_clock::now();
      const RunResult result = run(obj, spec, x0, config.v0, s, config.k_max,
                                   RecordPolicy{config.record_stride, config.records_per_decade});
      std::ofstream csv(out_dir / file, std::ios::binary);
      write_diagnostics_csv(csv, result.records);

      Outcome o;
      o.summary = json{{"file", file},
                       {"optimizer", optimizer_to_json(spec)},
                       {"wall_time_s", seconds_since(t_start)},
                       {"final_record", record_to_json(result.records.back())},
                       {"rate_fit", try_fit(column(result.records, &DiagnosticsRecord::t),
                                            column(result.records, &DiagnosticsRecord::E),
                                            config.rate_decades)}};
      if (result.negative_momentum_steps > 0) {
        o.summary["negative_momentum_steps"] = result.negative_momentum_steps;
        o.summary["first_negative_momentum"] = *result.first_negative_momentum;
      }
      if (result.diverged_at) {
        o.summary["diverged_at"] = *result.diverged_at;
        o.failed = true;
      }
      return o;
    }));
  }

  for (const auto& sim : config.simulations) {
    const std::string base = obj.name + "_" + (sim.system.kind == SystemKind::ld ? "LD" : "AVD");
    const std::string file = unique_name(used, base) + ".csv";
    jobs.push_back(std::async(std::launch::async, [&, sim, file] {
      const auto t_start = std::chrono::steady_clock::now();
      SimConfig cfg;
      cfg.system = sim.system;
      cfg.t0 = sim.t0.value_or(sim.system.kind == SystemKind::ld ? 0.0 : 1.0);
      cfg.T = cfg.t0 + config.T;
      cfg.dt = config.dt;
      cfg.x0 = x0;
      cfg.v0 = config.v0;
      cfg.sample_stride = config.sample_stride;
      cfg.integrator = sim.integrator;
      Outcome o;
      o.summary = json{{"file", file}, {"system", to_string(sim.system)}, {"t0", cfg.t0}};
      try {
        const auto traj = simulate(cfg, obj);
        std::ofstream csv(out_dir / file, std::ios::binary);
        write_trajectory_csv(csv, traj);
        std::vector<double> t, E;
        for (const auto& p : traj) {
          t.push_back(p.t);
          E.push_back(p.E);
        }
        o.summary["final_E"] = traj.back().E;
        o.summary["rate_fit"] = try_fit(t, E, config.rate_decades);
      } catch (const DivergenceError& e) {
        o.summary["diverged_at"] = e.step();
        o.summary["error"] = e.what();
        o.failed = true;
      }
      o.summary["wall_time_s"] = seconds_since(t_start);
      return o;
    }));
  }

  json manifest{{"config", config_to_json(config)}, {"jobs", json::array()}};
  bool failed = false;
  for (auto& job : jobs) {
    Outcome o = job.get();
    failed = failed || o.failed;
    log << o.summary.at("file").get<std::string>()
        << (o.failed ? "  DIVERGED" : "") << '\n';
    manifest["jobs"].push_back(std::move(o.summary));
  }
  manifest["wall_time_s"] = seconds_since(started);
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return failed ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// figures

FigurePreset figure_preset(const std::string& which) {
  if (which == "fig2") return {"fig2", "flat", 2e-5, {1.2}};
  if (which == "fig3") return {"fig3", "nonkl", 1e-2, {1.0}};
  if (which == "fig4") return {"fig4", "uneven", 1e-2, {1.0}};
  if (which == "fig5") return {"fig5", "contmin", 1e-2, {2.0}};
  throw ConfigError("no rate-comparison preset for '" + which + "'");
}

namespace {

const std::vector<OptimizerSpec>& figure_methods() {
  static const std::vector<OptimizerSpec> methods{OptimizerSpec::lydia(), OptimizerSpec::avd_nag(3.1),
                                                  OptimizerSpec::hbf(1.0), OptimizerSpec::gd()};
  return methods;
}

int rate_figure(const std::string& which, const FigureOptions& options, std::ostream& log) {
  FigurePreset preset = figure_preset(which);
  preset.k_max = std::max<std::size_t>(
      100, static_cast<std::size_t>(std::llround(static_cast<double>(preset.k_max) * options.scale)));
  const Objective obj = build_objective(preset.objective);
  const fs::path out_dir(options.output_dir);
  fs::create_directories(out_dir);

  std::vector<std::future<RunResult>> futures;
  for (const auto& spec : figure_methods())
    futures.push_back(std::async(std::launch::async, [&obj, &preset, spec] {
      return run(obj, spec, preset.x0, {}, preset.s, preset.k_max,
                 RecordPolicy{1, preset.records_per_decade});
    }));

  PlotPanel left{"f(x) - f*: " + obj.name, "t", "f - f*", true, true, {}};
  PlotPanel right{"Lyapunov energy E: " + obj.name, "t", "E", true, true, {}};
  json summary{{"figure", which},
               {"objective", obj.name},
               {"s", preset.s},
               {"x0", preset.x0},
               {"k_max", preset.k_max},
               {"methods", json::object()}};
  bool failed = false;
  std::map<std::string, double> final_energy;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    const OptimizerSpec& spec = figure_methods()[i];
    const RunResult result = futures[i].get();
    const std::string kind = to_string(spec.kind);
    std::ofstream csv(out_dir / (which + "_" + kind + ".csv"), std::ios::binary);
    write_diagnostics_csv(csv, result.records);

    const auto t = column(result.records, &DiagnosticsRecord::t);
    const auto E = column(result.records, &DiagnosticsRecord::E);
    const auto gap = column(result.records, &DiagnosticsRecord::f_gap);
    left.series.push_back({method_label(spec), t, gap});
    right.series.push_back({method_label(spec), t, E});

    json entry{{"label", method_label(spec)},
               {"E_fit", try_fit(t, E, 1.0)},
               {"f_gap_fit", try_fit(t, gap, 1.0)},
               {"f_gap_fit_oscillatory", true},
               {"final_f_gap", gap.back()},
               {"final_E", E.back()},
               {"recorded_E_monotone", !audit_monotonicity(E, 1e-12).has_value()}};
    if (result.diverged_at) {
      entry["diverged_at"] = *result.diverged_at;
      failed = true;
    }
    final_energy[kind] = E.back();
    summary["methods"][kind] = entry;
    log << which << "  " << std::string(method_label(spec)) << "  E exponent: ";
    if (entry["E_fit"].contains("exponent"))
      log << entry["E_fit"]["exponent"].get<double>() << '\n';
    else
      log << "n/a\n";
  }
  double worst_other = 0.0;
  for (const auto& [kind, e] : final_energy)
    if (kind != "lydia") worst_other = std::max(worst_other, e);
  summary["lydia_trails_all_in_E"] = final_energy["lydia"] > worst_other;

  write_file(out_dir / (which + "_summary.json"), summary.dump(2) + "\n");
  if (!write_svg((out_dir / (which + ".svg")).string(), {left, right}))
    log << "warning: could not write " << which << ".svg\n";
  return failed ? kExitFailure : kExitOk;
}

int t0_figure(const FigureOptions& options, std::ostream& log) {
  const Objective obj = build_objective("quartic2d");
  const fs::path out_dir(options.output_dir);
  fs::create_directories(out_dir);
  const double elapsed = std::max(10.0, 20.0 * options.scale);
  const double dt = 1e-3;

  struct Run {
    std::string name;
    System system;
    double t0;
    std::vector<TrajectorySample> traj;
  };
  std::vector<Run> runs{{"LD_t0_0", System::ld(), 0.0, {}},
                        {"LD_t0_50", System::ld(), 50.0, {}},
                        {"AVD_t0_1", System::avd(3.1), 1.0, {}},
                        {"AVD_t0_50", System::avd(3.1), 50.0, {}}};
  PlotPanel left{"f(x(t)) - f* on quartic2d", "t - t0", "f - f*", false, true, {}};
  PlotPanel right{"trajectories in (x1, x2)", "x1", "x2", false, false, {}};
  for (auto& r : runs) {
    SimConfig cfg;
    cfg.system = r.system;
    cfg.t0 = r.t0;
    cfg.T = r.t0 + elapsed;
    cfg.dt = dt;
    cfg.x0 = obj.default_start;
    cfg.sample_stride = 10;
    r.traj = simulate(cfg, obj);
    std::ofstream csv(out_dir / ("fig1_" + r.name + ".csv"), std::ios::binary);
    write_trajectory_csv(csv, r.traj);
    PlotSeries gap{r.name, {}, {}}, path{r.name, {}, {}};
    for (const auto& p : r.traj) {
      gap.x.push_back(p.t - r.t0);
      gap.y.push_back(obj.gap(p.x));
      path.x.push_back(p.x[0]);
      path.y.push_back(p.x[1]);
    }
    left.series.push_back(std::move(gap));
    right.series.push_back(std::move(path));
  }

  double ld_deviation = 0.0;
  for (std::size_t i = 0; i < runs[0].traj.size(); ++i)
    for (std::size_t d = 0; d < obj.dim; ++d) {
      ld_deviation = std::max(ld_deviation, std::abs(runs[0].traj[i].x[d] - runs[1].traj[i].x[d]));
      ld_deviation = std::max(ld_deviation, std::abs(runs[0].traj[i].v[d] - runs[1].traj[i].v[d]));
    }
  // Samples are every 10 steps of 1e-3, so elapsed time 10 is sample 1000.
  const std::size_t at10 = 1000;
  const double gap_a = obj.gap(runs[2].traj[at10].x);
  const double gap_b = obj.gap(runs[3].traj[at10].x);
  const double ratio = std::max(gap_a, gap_b) / std::min(gap_a, gap_b);
  json summary{{"figure", "fig1"},
               {"objective", obj.name},
               {"dt", dt},
               {"elapsed", elapsed},
               {"ld_max_shift_deviation", ld_deviation},
               {"avd_gap_at_elapsed_10", {{"t0_1", gap_a}, {"t0_50", gap_b}}},
               {"avd_gap_ratio", ratio}};
  write_file(out_dir / "fig1_summary.json", summary.dump(2) + "\n");
  if (!write_svg((out_dir / "fig1.svg").string(), {left, right}))
    log << "warning: could not write fig1.svg\n";
  log << "fig1  LD shift deviation " << ld_deviation << ", AVD gap ratio at t-t0=10: " << ratio
      << '\n';
  return kExitOk;
}

}  // namespace

int cmd_figures(const std::string& which, const FigureOptions& options, std::ostream& log) {
  if (!(options.scale > 0.0)) throw ConfigError("scale must be positive");
  if (which == "all") {
    int status = kExitOk;
    for (const char* f : {"fig1", "fig2", "fig3", "fig4", "fig5"})
      status = std::max(status, cmd_figures(f, options, log));
    return status;
  }
  if (which == "fig1") return t0_figure(options, log);
  if (which == "fig2" || which == "fig3" || which == "fig4" || which == "fig5")
    return rate_figure(which, options, log);
  throw ConfigError("unknown figure '" + which + "' (expected fig1..fig5 or all)");
}

// ---------------------------------------------------------------------------
// check

namespace {

// Objectives whose gradient is Lipschitz on the region LYDIA visits.
std::vector<Objective> smooth_objectives() {
  return {build_objective("quadratic", {std::nullopt, {1.0, 0.1}}), build_objective("contmin"),
          build_objective("uneven"), build_objective("quartic2d")};
}

std::vector<TrajectorySample> ld_trajectory(const Objective& obj, const Point& x0, double dt,
                                            const LdField& field) {
  SimConfig cfg;
  cfg.system = System::ld();
  cfg.t0 = 0.0;
  cfg.T = 10.0;
  cfg.dt = dt;
  cfg.x0 = x0;
  if (!field) return simulate(cfg, obj);
  return integrate([&](double t, std::span<const double> x,
                       std::span<const double> v) { return field(obj, t, x, v); },
                   obj, cfg);
}

}  // namespace

std::vector<std::pair<Objective, Point>> identity_cases() {
  return {{build_objective("quadratic"), {1.0}}, {build_objective("quartic2d"), {1.0, 1.0}}};
}

std::vector<CheckRow> run_checks(const CheckOptions& options) {
  std::vector<CheckRow> rows;
  auto add = [&rows](std::string name, double value, double threshold, bool pass) {
    rows.push_back({std::move(name), value, threshold, pass});
  };

  for (const auto& name : objective_names()) {
    const Objective obj = build_objective(name);
    const double err = max_sampled_gradient_error(obj, 100, options.seed);
    add("gradient " + name, err, 1e-4, err <= 1e-4);
  }

  for (const auto& [obj, x0] : identity_cases()) try {
    const auto coarse = ld_trajectory(obj, x0, 1e-3, options.ld_field);
    const auto fine = ld_trajectory(obj, x0, 5e-4, options.ld_field);
    const double e0 = coarse.front().E;

    const double d1 = check_energy_derivative(coarse, obj);
    const double d2 = check_energy_derivative(fine, obj);
    add("dE/dt identity " + obj.name + " (dt=1e-3, /E0)", d1 / e0, 1e-2, d1 <= 1e-2 * e0);
    add("dE/dt identity " + obj.name + " halving ratio", d1 / d2, 2.0,
        d1 / d2 >= 1.7 && d1 / d2 <= 2.3);

    const double i1 = check_integral_identity(coarse, obj);
    const double i2 = check_integral_identity(fine, obj);
    add("integral identity " + obj.name + " (dt=1e-3, /E0)", i1 / e0, 1e-2, i1 <= 1e-2 * e0);
    add("integral identity " + obj.name + " halving ratio", i1 / i2, 2.0,
        i1 / i2 >= 1.7 && i1 / i2 <= 2.3);
  } catch (const DivergenceError&) {
    const double inf = std::numeric_limits<double>::infinity();
    add("dE/dt identity " + obj.name + " (dt=1e-3, /E0)", inf, 1e-2, false);
    add("integral identity " + obj.name + " (dt=1e-3, /E0)", inf, 1e-2, false);
  }

  std::mt19937_64 rng(options.seed);
  for (const std::vector<double>& coeffs :
       {std::vector<double>{1.0}, {2.0}, {1.0, 0.1}, {3.0, 1.0, 0.5}}) {
    const Objective obj = build_objective("quadratic", {std::nullopt, coeffs});
    std::uniform_real_distribution<double> coord(-obj.box_half_width, obj.box_half_width);
    const double s = 1.0 / *obj.lipschitz;
    double worst = -std::numeric_limits<double>::infinity();
    double scale = 1.0;
    Point x(obj.dim), y(obj.dim);
    for (int i = 0; i < 100; ++i) {
      for (auto& v : x) v = coord(rng);
      for (auto& v : y) v = coord(rng);
      worst = std::max(worst, descent_lemma_residual(obj, x, y, s));
      scale = std::max({scale, obj.value(x), obj.value(y)});
    }
    add("descent lemma quadratic dim=" + std::to_string(obj.dim) +
            " L=" + format_number(*obj.lipschitz),
        worst, 1e-10 * scale, worst <= 1e-10 * scale);
  }

  for (const Objective& obj : smooth_objectives()) {
    const double s = 1.0 / *obj.lipschitz;
    double worst_decrease = -std::numeric_limits<double>::infinity();
    std::vector<double> energies;
    energies.reserve(options.lydia_steps + 1);
    double e0 = 0.0;
    run(obj, OptimizerSpec::lydia(), obj.default_start, {}, s, options.lydia_steps, {options.lydia_steps, 0},
        [&](const IterateState& before, const IterateState& after) {
          if (energies.empty()) {
            energies.push_back(before.E);
            e0 = before.E0;
          }
          energies.push_back(after.E);
          if (after.k <= 10'000)
            worst_decrease = std::max(worst_decrease, step_decrease_residual(obj, before, after));
        });
    add("per-step energy decrease " + obj.name + " (/E0)", worst_decrease / e0, 1e-10,
        worst_decrease <= 1e-10 * e0);
    const auto violation = audit_monotonicity(energies, options.monotonicity_tol_rel);
    add("LYDIA monotone E " + obj.name + " (first violation)",
        violation ? static_cast<double>(*violation) : -1.0, options.monotonicity_tol_rel,
        !violation.has_value());
  }

  {
    const Objective half_square = build_objective("quadratic");
    const RunResult trace = run(half_square, OptimizerSpec::lydia(), {1.0}, {}, 1.0, 3);
    const std::vector<double> expected{0.5, 0.5, 0.0, 0.0};
    double worst = 0.0;
    std::vector<double> energies;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      energies.push_back(trace.records[i].E);
      worst = std::max(worst, std::abs(trace.records[i].E - expected[i]));
    }
    add("LYDIA trace on x^2/2 (max |E - oracle|)", worst, 1e-15,
        worst <= 1e-15 && trace.records.size() == expected.size());
    const bool mono = !audit_monotonicity(energies, options.monotonicity_tol_rel, 0.0);
    add("LYDIA trace monotone at given tolerance", mono ? 0.0 : 1.0, options.monotonicity_tol_rel,
        mono);
  }
  return rows;
}

int cmd_check(const CheckOptions& options, std::ostream& out) {
  const auto rows = run_checks(options);
  bool ok = true;
  char line[256];
  std::snprintf(line, sizeof line, "%-52s %14s %12s  %s\n", "check", "value", "threshold",
                "result");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-52s %14.6g %12.3g  %s\n", r.name.c_str(), r.value,
                  r.threshold, r.pass ? "PASS" : "FAIL");
    out << line;
    ok = ok && r.pass;
  }
  out << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? kExitOk : kExitFailure;
}

int cmd_rates(const std::string& path, const std::string& column_name, double decades,
              std::ostream& out) {
  const auto columns = read_csv_columns(path);
  const auto t = columns.find("t");
  const auto values = columns.find(column_name);
  if (t == columns.end()) throw ConfigError("'" + path + "' has no t column");
  if (values == columns.end())
    throw ConfigError("'" + path + "' has no column '" + column_name + "'");
  try {
    json j = estimate_rate(t->second, values->second, decades);
    j["column"] = column_name;
    if (column_name == "f_gap") j["oscillatory_series"] = true;
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const InsufficientDataError& e) {
    out << json{{"column", column_name}, {"error", e.what()}}.dump(2) << '\n';
    return kExitFailure;
  }
}

int cmd_list(std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %4s %7s %14s %9s %16s %12s\n", "name", "dim", "f_star",
                "lipschitz", "box", "default x0", "default s");
  out << line;
  for (const auto& name : objective_names()) {
    const Objective obj = build_objective(name);
    std::string start;
    for (double v : obj.default_start) start += (start.empty() ? "" : ",") + format_number(v);
    std::snprintf(line, sizeof line, "%-10s %4zu %7g %14.6g %9g %16s %12.6g\n", name.c_str(),
                  obj.dim, obj.f_star, obj.lipschitz.value_or(0.0), obj.box_half_width,
                  start.c_str(), default_step_size(obj));
    out << line;
  }
  return kExitOk;
}

}  // namespace lydia::cli
