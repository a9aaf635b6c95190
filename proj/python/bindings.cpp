#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fronfix/analysis.hpp"
#include "fronfix/errors.hpp"
#include "fronfix/oracles.hpp"
#include "fronfix/scheme.hpp"

namespace py = pybind11;
using namespace fronfix;

namespace {

py::array_t<double> to_array(std::span<const double> s) {
    py::array_t<double> out(static_cast<py::ssize_t>(s.size()));
    std::copy(s.begin(), s.end(), out.mutable_data());
    return out;
}

py::dict lemma1_dict(const Lemma1Report& r) {
    py::dict d;
    d["cond_convection"] = r.cond_convection;
    d["convection_skipped"] = r.convection_skipped;
    d["cond_timestep"] = r.cond_timestep;
    d["compliant"] = r.compliant();
    d["negative_A"] = r.negative_A;
    d["negative_B"] = r.negative_B;
    d["negative_C"] = r.negative_C;
    return d;
}

py::dict audit_dict(const AuditReport& a) {
    py::dict d;
    d["ok"] = a.ok();
    d["violations"] = a.violations.size();
    d["xf_increase"] = a.count(ViolationKind::xf_increase);
    d["xf_nonpositive"] = a.count(ViolationKind::xf_nonpositive);
    d["v_negative"] = a.count(ViolationKind::v_negative);
    d["v_increase_in_m"] = a.count(ViolationKind::v_increase_in_m);
    return d;
}

}  // namespace

PYBIND11_MODULE(_fronfix, m) {
    m.doc() = "Front-fixing Crank-Nicolson solver for American puts";

    static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        }
    });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double r, double sigma, double E, double T, double alpha) {
                 return ModelParams{r, sigma, E, T, alpha};
             }),
             py::arg("r") = 0.1, py::arg("sigma") = 0.2, py::arg("E") = 1.0, py::arg("T") = 1.0,
             py::arg("alpha") = 1.0)
        .def_readwrite("r", &ModelParams::rate)
        .def_readwrite("sigma", &ModelParams::sigma)
        .def_readwrite("E", &ModelParams::strike)
        .def_readwrite("T", &ModelParams::maturity)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(r=" + std::to_string(p.rate) + ", sigma=" + std::to_string(p.sigma) +
                   ", E=" + std::to_string(p.strike) + ", T=" + std::to_string(p.maturity) +
                   ", alpha=" + std::to_string(p.alpha) + ")";
        });

    py::class_<GridSpec>(m, "GridSpec")
        .def_readonly("Y", &GridSpec::y_max)
        .def_readonly("M", &GridSpec::nodes)
        .def_readonly("mu", &GridSpec::mu)
        .def_readonly("dy", &GridSpec::dy)
        .def_readonly("dtau", &GridSpec::dtau)
        .def_readonly("N", &GridSpec::steps)
        .def_property_readonly("horizon", &GridSpec::horizon);

    m.def("build_grid", &build_grid, py::arg("params"), py::arg("M"), py::arg("mu"), py::arg("Y"));

    py::class_<SolverResult>(m, "SolverResult")
        .def_readonly("params", &SolverResult::params)
        .def_readonly("grid", &SolverResult::grid)
        .def_property_readonly("variant",
                               [](const SolverResult& r) { return std::string(to_string(r.variant)); })
        .def_property_readonly("xf", [](const SolverResult& r) { return to_array(r.surface.xf()); })
        .def_property_readonly("v",
                               [](const SolverResult& r) {
                                   auto a = to_array(r.surface.values());
                                   return a.reshape({r.grid.steps + 1, r.grid.nodes + 1});
                               })
        .def_property_readonly("max_iterations", &SolverResult::max_iterations)
        .def_property_readonly("denominator_warnings", &SolverResult::denominator_warnings)
        .def("price_at", [](const SolverResult& r, double s) { return price_at(r, s); },
             py::arg("S"));

    m.def(
        "run_solver",
        [](const ModelParams& p, int M, double mu, double Y, const std::string& variant) {
            SolverOptions o;
            o.variant = parse_variant(variant);
            py::gil_scoped_release release;
            return run_solver(p, M, mu, Y, o);
        },
        py::arg("params"), py::arg("M") = 100, py::arg("mu") = 20.0, py::arg("Y") = 4.0,
        py::arg("variant") = "consistent");

    m.def("lemma1_check", [](const ModelParams& p, const GridSpec& g) {
        return lemma1_dict(lemma1_check(p, g));
    });
    m.def("monotonicity_audit", [](const SolverResult& r, double tol) {
        return audit_dict(monotonicity_audit(r.surface, tol));
    }, py::arg("result"), py::arg("tol") = 1e-9);

    m.def(
        "amplification_factor",
        [](const ModelParams& p, const GridSpec& g, double b, double a, int n) {
            AmplificationQuery q;
            q.params = p;
            q.grid = g;
            q.b = b;
            q.a = a;
            q.n = n;
            return amplification_factor(q).lambda;
        },
        py::arg("params"), py::arg("grid"), py::arg("b"), py::arg("a"), py::arg("n"));

    m.def("binomial_american_put",
          [](const ModelParams& p, double s, int steps) { return binomial_american_put(p, s, steps).price; },
          py::arg("params"), py::arg("S"), py::arg("steps") = 5000);
    m.def(
        "psor_american_put",
        [](const ModelParams& p, double s, int nodes, int steps) {
            PsorOptions o;
            o.space_nodes = nodes;
            o.time_steps = steps;
            auto r = psor_american_put(p, s, o);
            return py::make_tuple(r.price, r.boundary_estimate ? py::cast(*r.boundary_estimate)
                                                               : py::none());
        },
        py::arg("params"), py::arg("S"), py::arg("nodes") = 400, py::arg("steps") = 400);
    m.def("european_put", &european_put_closed_form, py::arg("params"), py::arg("S"));
}
