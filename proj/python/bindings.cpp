#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fhelm/config.hpp"
#include "fhelm/dual.hpp"
#include "fhelm/errors.hpp"
#include "fhelm/exponents.hpp"
#include "fhelm/io.hpp"
#include "fhelm/resolvent.hpp"
#include "fhelm/runner.hpp"
#include "fhelm/special.hpp"

namespace py = pybind11;
using namespace fhelm;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const Grid& g) {
  return std::vector<py::ssize_t>(g.dim(), g.points_per_axis());
}

void check_shape(const Grid& g, const py::buffer_info& info) {
  if (info.ndim != g.dim()) throw UsageError("array rank differs from the grid dimension");
  for (auto s : info.shape)
    if (s != g.points_per_axis()) throw UsageError("array shape differs from the grid");
}

ComplexField field_from(const Grid& g, const CArray& a) {
  check_shape(g, a.request());
  const auto* p = a.data();
  return ComplexField(g, std::vector<cplx>(p, p + a.size()), Space::physical);
}

CArray array_from(const ComplexField& f) {
  CArray out(shape_of(f.grid()));
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Vec vec_from(const Grid& g, const RArray& a) {
  check_shape(g, a.request());
  return Vec(a.data(), a.data() + a.size());
}

RArray array_from(const Grid& g, const Vec& v) {
  RArray out(shape_of(g));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ResolventParams make_params(int n, double s, double lambda, double epsilon) {
  ResolventParams p;
  p.n = n;
  p.s = s;
  p.lambda = lambda;
  p.epsilon = epsilon;
  return p;
}

}  // namespace

PYBIND11_MODULE(_fhelm, m) {
  m.doc() = "Fractional Helmholtz pseudospectral core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<InconsistencyError>(m, "InconsistencyError", PyExc_RuntimeError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, double>(), py::arg("n"), py::arg("points_per_axis"), py::arg("box_length"))
      .def_property_readonly("n", &Grid::dim)
      .def_property_readonly("points_per_axis", &Grid::points_per_axis)
      .def_property_readonly("box_length", &Grid::box_length)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("freq_spacing", &Grid::freq_spacing)
      .def_property_readonly("nyquist", &Grid::nyquist)
      .def("coordinates", [](const Grid& g) {
        std::vector<double> x(g.points_per_axis());
        for (int j = 0; j < g.points_per_axis(); ++j) x[j] = g.coordinate(j);
        return x;
      });

  m.def("eps_floor", [](const Grid& g, double s, double lambda) {
    return eps_floor(make_params(g.dim(), s, lambda, 1.0), g);
  }, py::arg("grid"), py::arg("s"), py::arg("lam"));

  m.def("apply_resolvent", [](const Grid& g, const CArray& f, double s, double lambda, double eps) {
    return array_from(apply_resolvent(field_from(g, f), make_params(g.dim(), s, lambda, eps)));
  }, py::arg("grid"), py::arg("f"), py::arg("s"), py::arg("lam"), py::arg("eps"));

  m.def("apply_forward_operator", [](const Grid& g, const CArray& u, double s, double lambda, double eps) {
    return array_from(apply_forward_operator(field_from(g, u), make_params(g.dim(), s, lambda, eps)));
  }, py::arg("grid"), py::arg("u"), py::arg("s"), py::arg("lam"), py::arg("eps"));

  m.def("lp_norm", [](const Grid& g, const CArray& f, double p) { return lp_norm(field_from(g, f), p); },
        py::arg("grid"), py::arg("f"), py::arg("p"));

  m.def("hankel1", &hankel1, py::arg("nu"), py::arg("z"));
  m.def("green_classical", &green_classical, py::arg("n"), py::arg("lam"), py::arg("r"));

  m.def("thm1_admissible", [](int n, double s, double p, double q) {
    const auto v = thm1_admissible(n, s, ExponentTriple{p, q, std::nullopt});
    return py::make_tuple(v.admissible, v.failed_conditions);
  }, py::arg("n"), py::arg("s"), py::arg("p"), py::arg("q"));

  m.def("thm3_q_window", [](int n, double s, double t) {
    const auto w = thm3_q_window(n, s, t);
    py::dict d;
    d["case"] = w.case_label;
    d["row"] = w.row;
    d["q_lo"] = w.q_lo;
    d["q_hi"] = w.q_hi;
    d["empty"] = w.empty;
    return d;
  }, py::arg("n"), py::arg("s"), py::arg("t"));

  m.def("tau_alpha", [](int n, double alpha, bool continuous) { return tau_alpha(n, alpha, continuous); },
        py::arg("n"), py::arg("alpha"), py::arg("continuous") = false);

  py::class_<DualProblem>(m, "DualProblem")
      .def(py::init([](const Grid& g, double s, double lambda, double p, const std::string& weight,
                       double radius, int cells, double epsilon) {
             WeightSpec ws;
             ws.kind = parse_weight_kind(weight);
             ws.radius = radius;
             ws.cells = cells;
             return DualProblem(WeightQ(g, ws), make_params(g.dim(), s, lambda, epsilon), p);
           }),
           py::arg("grid"), py::arg("s"), py::arg("lam"), py::arg("p"), py::arg("weight") = "bump_compact",
           py::arg("radius") = 3.0, py::arg("cells") = 4, py::arg("epsilon") = 0.0)
      .def_property_readonly("epsilon", &DualProblem::epsilon)
      .def_property_readonly("p_conjugate", &DualProblem::p_conjugate)
      .def("apply_Kp", [](const DualProblem& d, const RArray& v) {
        return array_from(d.grid(), d.apply_Kp(vec_from(d.grid(), v)));
      })
      .def("eval_J", [](const DualProblem& d, const RArray& v) { return d.eval_J(vec_from(d.grid(), v)); })
      .def("grad_J", [](const DualProblem& d, const RArray& v) {
        return array_from(d.grid(), d.grad_J(vec_from(d.grid(), v)));
      })
      .def("weight", [](const DualProblem& d) { return array_from(d.grid(), d.weight().samples()); });

  m.def("experiments", &experiment_names);

  m.def("run_config", [](const std::string& config_json, const std::string& out_dir) {
    RunConfig cfg;
    try {
      cfg = RunConfig::from_json(nlohmann::json::parse(config_json));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    RunOutcome r;
    {
      py::gil_scoped_release release;
      r = run(cfg, opts);
    }
    return py::make_tuple(r.exit_code, r.message, r.summary.is_null() ? std::string("{}") : r.summary.dump());
  }, py::arg("config_json"), py::arg("out_dir") = "");

  m.def("read_snapshot", [](const std::string& base) { return array_from(read_snapshot(base)); },
        py::arg("base"));
}
