#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lydia/analysis.hpp"
#include "lydia/errors.hpp"
#include "lydia/objectives.hpp"
#include "lydia/odesim.hpp"
#include "lydia/optimizers.hpp"

namespace py = pybind11;
using namespace lydia;

namespace {

OptimizerSpec make_spec(const std::string& kind, std::optional<double> a, std::optional<double> gamma,
                        const std::string& grad_at) {
  OptimizerSpec spec;
  spec.kind = parse_optimizer_kind(kind);
  spec.a = a;
  spec.gamma = gamma;
  if (spec.kind == OptimizerKind::avd_nag && !spec.a) spec.a = 3.1;
  if (spec.kind == OptimizerKind::hbf && !spec.gamma) spec.gamma = 1.0;
  spec.grad_at = parse_gradient_point(grad_at);
  if (spec.kind == OptimizerKind::hbf || spec.kind == OptimizerKind::gd) spec.grad_at = GradientPoint::current;
  spec.validate();
  return spec;
}

py::dict columns(const std::vector<DiagnosticsRecord>& records) {
  std::vector<std::size_t> k;
  std::vector<double> t, gap, E, grad, step;
  for (const auto& r : records) {
    k.push_back(r.k);
    t.push_back(r.t);
    gap.push_back(r.f_gap);
    E.push_back(r.E);
    grad.push_back(r.grad_norm);
    step.push_back(r.step_norm);
  }
  py::dict d;
  d["k"] = k;
  d["t"] = t;
  d["f_gap"] = gap;
  d["E"] = E;
  d["grad_norm"] = grad;
  d["step_norm"] = step;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lyapunov-damped inertial optimization";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_RuntimeError);

  py::class_<Objective>(m, "Objective")
      .def_readonly("name", &Objective::name)
      .def_readonly("dim", &Objective::dim)
      .def_readonly("f_star", &Objective::f_star)
      .def_readonly("lipschitz", &Objective::lipschitz)
      .def_readonly("box_half_width", &Objective::box_half_width)
      .def_readonly("default_start", &Objective::default_start)
      .def("value", [](const Objective& o, const Point& x) { return o.value(x); })
      .def("gradient", [](const Objective& o, const Point& x) { return o.gradient(x); })
      .def("gap", [](const Objective& o, const Point& x) { return o.gap(x); })
      .def("__repr__", [](const Objective& o) { return "<Objective " + o.name + ">"; });

  m.def("objective_names", &objective_names);
  m.def(
      "build_objective",
      [](const std::string& name, std::optional<double> eps, std::vector<double> coeffs) {
        return build_objective(name, {eps, std::move(coeffs)});
      },
      py::arg("name"), py::arg("eps") = py::none(), py::arg("coeffs") = std::vector<double>{});
  m.def(
      "check_gradient",
      [](const Objective& o, const Point& x, double h) { return check_gradient(o, x, h); },
      py::arg("objective"), py::arg("x"), py::arg("h") = 1e-6);
  m.def("max_sampled_gradient_error", &max_sampled_gradient_error, py::arg("objective"),
        py::arg("n") = 100, py::arg("seed") = 0, py::arg("h") = 1e-6);

  py::class_<IterateState>(m, "IterateState")
      .def_readonly("k", &IterateState::k)
      .def_readonly("x", &IterateState::x)
      .def_readonly("x_prev", &IterateState::x_prev)
      .def_readonly("s", &IterateState::s)
      .def_readonly("E", &IterateState::E)
      .def_readonly("E0", &IterateState::E0)
      .def_readonly("negative_momentum", &IterateState::negative_momentum)
      .def_property_readonly("t", &IterateState::time);

  m.def("init_state", &init_state, py::arg("objective"), py::arg("x0"), py::arg("v0") = Point{},
        py::arg("s"));
  m.def("nag_momentum", &nag_momentum, py::arg("k"), py::arg("a"));
  m.def(
      "step",
      [](const IterateState& st, const Objective& o, const std::string& kind, std::optional<double> a,
         std::optional<double> gamma, const std::string& grad_at) {
        return step(st, o, make_spec(kind, a, gamma, grad_at));
      },
      py::arg("state"), py::arg("objective"), py::arg("kind") = "lydia", py::arg("a") = py::none(),
      py::arg("gamma") = py::none(), py::arg("grad_at") = "extrapolated");

  m.def(
      "run",
      [](const Objective& o, const std::string& kind, const Point& x0, double s, std::size_t k_max,
         const Point& v0, std::optional<double> a, std::optional<double> gamma, const std::string& grad_at,
         std::size_t record_stride, std::size_t records_per_decade) {
        const auto spec = make_spec(kind, a, gamma, grad_at);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(o, spec, x0, v0, s, k_max, {record_stride, records_per_decade});
        }
        py::dict d = columns(r.records);
        d["diverged_at"] = r.diverged_at ? py::cast(*r.diverged_at) : py::none();
        d["negative_momentum_steps"] = r.negative_momentum_steps;
        return d;
      },
      py::arg("objective"), py::arg("kind"), py::arg("x0"), py::arg("s"), py::arg("k_max"),
      py::arg("v0") = Point{}, py::arg("a") = py::none(), py::arg("gamma") = py::none(),
      py::arg("grad_at") = "extrapolated", py::arg("record_stride") = 1, py::arg("records_per_decade") = 0);

  m.def("descent_lemma_residual",
        [](const Objective& o, const Point& x, const Point& y, double s) { return descent_lemma_residual(o, x, y, s); },
        py::arg("objective"), py::arg("x"), py::arg("y"), py::arg("s"));
  m.def("step_decrease_residual", &step_decrease_residual, py::arg("objective"), py::arg("before"),
        py::arg("after"));

  m.def(
      "simulate",
      [](const Objective& o, const std::string& system, const Point& x0, double T, double dt, double t0,
         const Point& v0, double a, std::size_t sample_stride, const std::string& integrator) {
        SimConfig c;
        if (system == "LD")
          c.system = System::ld();
        else if (system == "AVD")
          c.system = System::avd(a);
        else
          throw ConfigError("system must be 'LD' or 'AVD'");
        if (integrator == "semi_implicit_euler")
          c.integrator = Integrator::semi_implicit_euler;
        else if (integrator == "explicit_euler")
          c.integrator = Integrator::explicit_euler;
        else
          throw ConfigError("unknown integrator '" + integrator + "'");
        c.t0 = t0;
        c.T = T;
        c.dt = dt;
        c.x0 = x0;
        c.v0 = v0;
        c.sample_stride = sample_stride;
        std::vector<TrajectorySample> traj;
        {
          py::gil_scoped_release release;
          traj = simulate(c, o);
        }
        py::dict d;
        d["energy_derivative_residual"] = traj.size() >= 3 ? check_energy_derivative(traj, o) : 0.0;
        d["integral_identity_residual"] = check_integral_identity(traj, o);
        std::vector<double> t, E;
        std::vector<Point> xs, vs;
        for (auto& p : traj) {
          t.push_back(p.t);
          E.push_back(p.E);
          xs.push_back(std::move(p.x));
          vs.push_back(std::move(p.v));
        }
        d["t"] = t;
        d["x"] = xs;
        d["v"] = vs;
        d["E"] = E;
        return d;
      },
      py::arg("objective"), py::arg("system") = "LD", py::arg("x0"), py::arg("T") = 10.0, py::arg("dt") = 1e-3,
      py::arg("t0") = 0.0, py::arg("v0") = Point{}, py::arg("a") = 3.1, py::arg("sample_stride") = 1,
      py::arg("integrator") = "semi_implicit_euler");

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("exponent", &RateFit::exponent)
      .def_readonly("intercept", &RateFit::intercept)
      .def_property_readonly("window", [](const RateFit& f) { return std::make_pair(f.t_lo, f.t_hi); })
      .def_readonly("r_squared", &RateFit::r_squared)
      .def_readonly("n_points", &RateFit::n_points)
      .def_readonly("n_excluded", &RateFit::n_excluded)
      .def("__repr__", [](const RateFit& f) {
        return "<RateFit exponent=" + std::to_string(f.exponent) + " n=" + std::to_string(f.n_points) + ">";
      });

  m.def(
      "estimate_rate",
      [](const std::vector<double>& t, const std::vector<double>& E, double decades) {
        return estimate_rate(t, E, decades);
      },
      py::arg("t"), py::arg("E"), py::arg("decades") = 1.0);
  m.def(
      "audit_monotonicity",
      [](const std::vector<double>& E, double tol_rel, double tol_abs) { return audit_monotonicity(E, tol_rel, tol_abs); },
      py::arg("E"), py::arg("tol_rel") = 1e-12, py::arg("tol_abs") = kUnderflowFloor);
  m.def(
      "check_rate_lower_bound",
      [](const RateFit& fit, double bound) {
        const auto c = check_rate_lower_bound(fit, bound);
        return std::make_pair(c.pass, c.margin);
      },
      py::arg("fit"), py::arg("bound") = kRateLowerBound);
}
