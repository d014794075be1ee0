#include "lydia/cli/config.hpp"

#include <cmath>
#include <set>

#include "lydia/errors.hpp"

namespace lydia::cli {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

SimulationSpec simulation_from_json(const json& j) {
  reject_unknown_keys(j, {"system", "a", "t0", "integrator"}, "simulation");
  SimulationSpec sim;
  const auto system = get<std::string>(j, "system");
  if (system == "LD" || system == "ld") {
    if (j.contains("a")) throw ConfigError("parameter a only applies to AVD");
    sim.system = System::ld();
  } else if (system == "AVD" || system == "avd") {
    sim.system = System::avd(j.contains("a") ? get<double>(j, "a") : 3.1);
  } else {
    throw ConfigError("unknown system '" + system + "'");
  }
  if (j.contains("t0")) sim.t0 = get<double>(j, "t0");
  if (j.contains("integrator")) {
    const auto name = get<std::string>(j, "integrator");
    if (name == "semi_implicit_euler")
      sim.integrator = Integrator::semi_implicit_euler;
    else if (name == "explicit_euler")
      sim.integrator = Integrator::explicit_euler;
    else
      throw ConfigError("unknown integrator '" + name + "'");
  }
  return sim;
}

json simulation_to_json(const SimulationSpec& sim) {
  json j{{"system", sim.system.kind == SystemKind::ld ? "LD" : "AVD"},
         {"t0", sim.t0.value_or(sim.system.kind == SystemKind::ld ? 0.0 : 1.0)},
         {"integrator", sim.integrator == Integrator::semi_implicit_euler ? "semi_implicit_euler"
                                                                          : "explicit_euler"}};
  if (sim.system.kind == SystemKind::avd) j["a"] = sim.system.a;
  return j;
}

}  // namespace

double default_step_size(const Objective& obj) {
  if (obj.name == "flat") return 2e-5;
  return obj.lipschitz ? 1.0 / *obj.lipschitz : 1e-3;
}

OptimizerSpec optimizer_from_json(const json& j) {
  if (j.is_string()) return optimizer_from_json(json{{"kind", j}});
  reject_unknown_keys(j, {"kind", "a", "gamma", "grad_at"}, "optimizer");
  OptimizerSpec spec;
  spec.kind = parse_optimizer_kind(get<std::string>(j, "kind"));
  if (j.contains("a")) spec.a = get<double>(j, "a");
  if (j.contains("gamma")) spec.gamma = get<double>(j, "gamma");
  // Defaults for the kind-specific constants.
  if (spec.kind == OptimizerKind::avd_nag && !spec.a) spec.a = 3.1;
  if (spec.kind == OptimizerKind::hbf && !spec.gamma) spec.gamma = 1.0;
  if (j.contains("grad_at")) {
    if (spec.kind != OptimizerKind::lydia && spec.kind != OptimizerKind::lydia_unscaled)
      throw ConfigError("grad_at only applies to lydia variants");
    spec.grad_at = parse_gradient_point(get<std::string>(j, "grad_at"));
  } else if (spec.kind == OptimizerKind::hbf || spec.kind == OptimizerKind::gd) {
    spec.grad_at = GradientPoint::current;
  }
  spec.validate();
  return spec;
}

json optimizer_to_json(const OptimizerSpec& spec) {
  json j{{"kind", to_string(spec.kind)}};
  if (spec.a) j["a"] = *spec.a;
  if (spec.gamma) j["gamma"] = *spec.gamma;
  if (spec.kind == OptimizerKind::lydia || spec.kind == OptimizerKind::lydia_unscaled)
    j["grad_at"] = to_string(spec.grad_at);
  return j;
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown_keys(doc,
                      {"objective", "optimizers", "simulations", "s", "k_max", "dt", "T", "x0",
                       "v0", "record_stride", "records_per_decade", "sample_stride",
                       "rate_decades", "output_dir", "seed"},
                      "config");
  ExperimentConfig c;
  if (doc.contains("objective")) {
    const json& obj = doc.at("objective");
    if (obj.is_string()) {
      c.objective = obj.get<std::string>();
    } else {
      reject_unknown_keys(obj, {"name", "params"}, "objective");
      c.objective = get<std::string>(obj, "name");
      if (obj.contains("params")) {
        const json& p = obj.at("params");
        reject_unknown_keys(p, {"eps", "coeffs"}, "objective params");
        if (p.contains("eps")) c.params.eps = get<double>(p, "eps");
        if (p.contains("coeffs")) c.params.coeffs = get<std::vector<double>>(p, "coeffs");
      }
    }
  }
  if (doc.contains("optimizers")) {
    if (!doc.at("optimizers").is_array()) throw ConfigError("optimizers must be an array");
    for (const auto& o : doc.at("optimizers")) c.optimizers.push_back(optimizer_from_json(o));
  }
  if (doc.contains("simulations")) {
    if (!doc.at("simulations").is_array()) throw ConfigError("simulations must be an array");
    for (const auto& s : doc.at("simulations")) c.simulations.push_back(simulation_from_json(s));
  }
  if (doc.contains("s")) c.s = get<double>(doc, "s");
  if (doc.contains("k_max")) c.k_max = get<std::size_t>(doc, "k_max");
  if (doc.contains("dt")) c.dt = get<double>(doc, "dt");
  if (doc.contains("T")) c.T = get<double>(doc, "T");
  if (doc.contains("x0")) c.x0 = get<Point>(doc, "x0");
  if (doc.contains("v0")) c.v0 = get<Point>(doc, "v0");
  if (doc.contains("record_stride")) c.record_stride = get<std::size_t>(doc, "record_stride");
  if (doc.contains("records_per_decade"))
    c.records_per_decade = get<std::size_t>(doc, "records_per_decade");
  if (doc.contains("sample_stride")) c.sample_stride = get<std::size_t>(doc, "sample_stride");
  if (doc.contains("rate_decades")) c.rate_decades = get<double>(doc, "rate_decades");
  if (doc.contains("output_dir")) c.output_dir = get<std::string>(doc, "output_dir");
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  const Objective obj = build_objective(c.objective, c.params);
  json params = json::object();
  if (c.objective == "contmin") params["eps"] = c.params.eps.value_or(0.5);
  if (c.objective == "quadratic")
    params["coeffs"] = c.params.coeffs.empty() ? std::vector<double>{1.0} : c.params.coeffs;

  json optimizers = json::array();
  for (const auto& o : c.optimizers) optimizers.push_back(optimizer_to_json(o));
  json simulations = json::array();
  for (const auto& s : c.simulations) simulations.push_back(simulation_to_json(s));

  return json{{"objective", {{"name", c.objective}, {"params", params}}},
              {"optimizers", optimizers},
              {"simulations", simulations},
              {"s", c.s.value_or(default_step_size(obj))},
              {"k_max", c.k_max},
              {"dt", c.dt},
              {"T", c.T},
              {"x0", c.x0.value_or(obj.default_start)},
              {"v0", c.v0.empty() ? Point(obj.dim, 0.0) : c.v0},
              {"record_stride", c.record_stride},
              {"records_per_decade", c.records_per_decade},
              {"sample_stride", c.sample_stride},
              {"rate_decades", c.rate_decades},
              {"output_dir", c.output_dir},
              {"seed", c.seed}};
}

void validate(const ExperimentConfig& c) {
  const Objective obj = build_objective(c.objective, c.params);
  if (c.optimizers.empty() && c.simulations.empty())
    throw ConfigError("config names no optimizers or simulations");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (!(c.rate_decades > 0.0)) throw ConfigError("rate_decades must be positive");
  const Point x0 = c.x0.value_or(obj.default_start);
  const double s = c.s.value_or(default_step_size(obj));
  if (!c.optimizers.empty()) {
    if (c.k_max < 1) throw ConfigError("k_max must be at least 1");
    if (c.record_stride < 1) throw ConfigError("record_stride must be at least 1");
    init_state(obj, x0, c.v0, s);
    for (const auto& spec : c.optimizers) {
      spec.validate();
      if (spec.kind == OptimizerKind::hbf && std::sqrt(s) * *spec.gamma >= 2.0)
        throw ConfigError("hbf requires sqrt(s) * gamma < 2");
    }
  }
  for (const auto& sim : c.simulations) {
    SimConfig cfg;
    cfg.system = sim.system;
    cfg.t0 = sim.t0.value_or(sim.system.kind == SystemKind::ld ? 0.0 : 1.0);
    cfg.T = cfg.t0 + c.T;
    cfg.dt = c.dt;
    cfg.x0 = x0;
    cfg.v0 = c.v0;
    cfg.sample_stride = c.sample_stride;
    cfg.validate(obj);
  }
}

}  // namespace lydia::cli
