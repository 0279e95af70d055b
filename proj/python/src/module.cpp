#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lde/charspec.hpp"
#include "lde/classify.hpp"
#include "lde/error.hpp"
#include "lde/expr.hpp"
#include "lde/hypotheses.hpp"
#include "lde/lattice.hpp"
#include "lde/model.hpp"

namespace py = pybind11;
using namespace lde;

namespace {

ClassifyOptions options(int branch, double delta, double step, double horizon) {
  ClassifyOptions o;
  o.branch = branch;
  o.delta = delta;
  o.integrate.step = step;
  o.horizon = horizon;
  return o;
}

py::dict bracket(const BisectionResult& r) {
  py::dict d;
  d["lo"] = r.lo;
  d["hi"] = r.hi;
  d["converged"] = r.converged;
  d["predicate_monotone"] = r.predicate_monotone;
  d["iterations"] = r.iterations;
  d["note"] = r.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Traveling-wave fronts of unidirectional lattice equations";

  py::register_exception<ComputationError>(m, "ComputationError", PyExc_RuntimeError);
  py::register_exception<expr::ParseError>(m, "ParseError", PyExc_ValueError);

  m.def(
      "critical_speed",
      [](std::vector<double> alpha, std::vector<double> kappa) { return critical_speed(coeffs(alpha, kappa)); },
      py::arg("alpha"), py::arg("kappa"), "c(alpha): inf over lambda > 0 of (alpha_0 + sum alpha_i e^{kappa_i lambda}) / lambda");
  m.def(
      "stability_threshold",
      [](std::vector<double> alpha, std::vector<double> kappa) { return stability_threshold(coeffs(alpha, kappa)); },
      py::arg("alpha"), py::arg("kappa"));
  m.def(
      "real_roots",
      [](double c, std::vector<double> alpha, std::vector<double> kappa) {
        return real_roots(c, coeffs(alpha, kappa));
      },
      py::arg("c"), py::arg("alpha"), py::arg("kappa"));

  py::class_<Model>(m, "Model")
      .def_readonly("name", &Model::name)
      .def_readonly("kappa", &Model::kappa)
      .def_readonly("grad0", &Model::grad0)
      .def_readonly("grad1", &Model::grad1)
      .def_readonly("beta", &Model::beta)
      .def_readonly("params", &Model::params)
      .def("__call__", [](const Model& self, std::vector<double> s) {
        if (s.size() != self.n_delays() + 1) throw InvalidArgument("expected N+1 arguments");
        return self(s);
      })
      .def("__repr__", [](const Model& self) { return "<Model " + self.name + ">"; });

  m.def("catalog_names", &catalog_names);
  m.def(
      "catalog", [](const std::string& name, const Params& params) { return catalog(name, params); },
      py::arg("name"), py::arg("params") = Params{});
  m.def("parse_model_config", [](const std::string& text) { return parse_model_config(text); }, py::arg("text"));
  m.def("load_model_file", &load_model_file, py::arg("path"));

  py::class_<Classification>(m, "Classification")
      .def_property_readonly("kind", [](const Classification& c) { return to_string(c.kind); })
      .def_readonly("first_crossing", &Classification::first_crossing)
      .def_readonly("min_value", &Classification::min_value)
      .def_readonly("max_value", &Classification::max_value)
      .def_readonly("entry_x", &Classification::entry_x)
      .def_readonly("dwell_confirmed", &Classification::dwell_confirmed)
      .def_readonly("monotone", &Classification::monotone)
      .def_readonly("x_end", &Classification::x_end)
      .def_readonly("final_value", &Classification::final_value)
      .def_property_readonly("is_front", [](const Classification& c) { return is_front(c.kind); });

  m.def(
      "classify",
      [](const Model& model, double c, int branch, double delta, double step, double horizon) {
        return shoot_and_classify(model, c, options(branch, delta, step, horizon));
      },
      py::arg("model"), py::arg("c"), py::arg("branch") = -1, py::arg("delta") = kDefaultDelta,
      py::arg("step") = 0.0, py::arg("horizon") = 0.0);
  m.def(
      "profile",
      [](const Model& model, double c, const std::vector<double>& xs, int branch, double delta, double step) {
        const Shot s = shoot(model, c, options(branch, delta, step, 0.0));
        std::vector<double> out;
        for (double x : xs) out.push_back(s.trajectory.value(x));
        return py::make_tuple(to_string(s.classification.kind), out);
      },
      py::arg("model"), py::arg("c"), py::arg("x"), py::arg("branch") = -1, py::arg("delta") = kDefaultDelta,
      py::arg("step") = 0.0, "Shoots the front at speed c and samples phi at the given x (x <= 0 uses the tail).");
  m.def(
      "scan",
      [](const Model& model, const std::vector<double>& cs, std::size_t workers) {
        std::vector<std::pair<double, std::string>> out;
        for (const auto& r : scan_speeds(model, cs, {}, workers)) out.emplace_back(r.c, to_string(r.classification.kind));
        return out;
      },
      py::arg("model"), py::arg("c"), py::arg("workers") = 0);
  m.def(
      "find_c_m",
      [](const Model& model, std::optional<double> lo, std::optional<double> hi, std::size_t workers) {
        BisectionOptions b;
        b.lo = lo;
        b.hi = hi;
        b.workers = workers;
        return bracket(find_c_m(model, b));
      },
      py::arg("model"), py::arg("lo") = py::none(), py::arg("hi") = py::none(), py::arg("workers") = 0);
  m.def(
      "find_c_f",
      [](const Model& model, std::optional<double> lo, std::optional<double> hi, std::size_t workers) {
        BisectionOptions b;
        b.lo = lo;
        b.hi = hi;
        b.workers = workers;
        return bracket(find_c_f(model, b));
      },
      py::arg("model"), py::arg("lo") = py::none(), py::arg("hi") = py::none(), py::arg("workers") = 0);

  m.def(
      "check_hypotheses",
      [](const Model& model, int n_grid, std::uint64_t seed) {
        CheckOptions o;
        o.n_grid = n_grid;
        o.seed = seed;
        py::dict out;
        for (const auto& c : check_hypotheses(model, o).clauses) out[py::str(c.name)] = to_string(c.status);
        return out;
      },
      py::arg("model"), py::arg("n_grid") = 64, py::arg("seed") = 1);

  m.def(
      "lattice_speed",
      [](const Model& model, const std::string& initial, double t_end, double dt, double front_c, double theta) {
        LatticeOptions o;
        o.initial = initial_kind_from_string(initial);
        o.t_end = t_end;
        o.dt = dt;
        o.front_c = front_c;
        const SpeedFit f = measure_speed(simulate(model, o), theta);
        return py::make_tuple(f.speed, f.residual);
      },
      py::arg("model"), py::arg("initial") = "step", py::arg("t_end") = 100.0, py::arg("dt") = 0.05,
      py::arg("front_c") = 0.0, py::arg("theta") = 0.5, "Direct lattice simulation; returns (speed, residual).");

  py::class_<expr::Expr>(m, "Expr")
      .def_static("parse", &expr::Expr::parse)
      .def("eval", [](const expr::Expr& e, std::vector<double> s, double sm) { return e.eval(s, sm); },
           py::arg("s"), py::arg("smoothing") = 0.0)
      .def("grad", [](const expr::Expr& e, std::vector<double> s, double sm) { return e.grad(s, sm); },
           py::arg("s"), py::arg("smoothing") = 0.0)
      .def("__str__", &expr::Expr::print);
}
