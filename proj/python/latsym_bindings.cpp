#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "latsym/catalog/catalog.hpp"
#include "latsym/cli/cli.hpp"
#include "latsym/continuum/continuum.hpp"
#include "latsym/dsl/expression.hpp"
#include "latsym/errors.hpp"
#include "latsym/flow/flow.hpp"
#include "latsym/symmetry/field.hpp"

namespace py = pybind11;
using namespace latsym;

namespace {

py::tuple run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

py::dict limit(const std::string& id, const std::map<std::string, std::string>& params, const std::string& probe) {
    auto entry = catalog::instantiate(id, params);
    continuum::LimitProbe p;
    p.function = probe;
    auto fit = continuum::leading_order_coefficients(entry, p);
    py::dict d;
    d["probe"] = fit.probe;
    d["dictionary"] = fit.dictionary;
    d["scales"] = fit.scales;
    d["coefficients"] = fit.coefficients;
    d["remainder"] = fit.remainder;
    d["order"] = fit.order;
    d["condition"] = fit.condition;
    if (entry.continuum) d["expected"] = entry.continuum->expected;
    return d;
}

py::dict change_of_variables(double c, bool printed, double k) {
    auto r = continuum::verify_change_of_variables(
        c, printed ? continuum::BetaScaling::Printed : continuum::BetaScaling::Corrected, k);
    py::dict d;
    d["c"] = r.c;
    d["max_relative_residual"] = r.max_relative_residual;
    d["max_u_t"] = r.max_u_t;
    d["points"] = r.points;
    return d;
}

py::tuple flow_point(const std::string& field, const std::array<double, 3>& p, double lambda, int substeps,
                     const std::map<std::string, double>& params) {
    auto f = symmetry::ExpressionField::from_text(field, params);
    flow::FlowOptions opts;
    opts.lambda = lambda;
    opts.substeps = substeps;
    auto r = flow::integrate_flow(f.function(), p, opts);
    return py::make_tuple(r.value, r.error_estimate);
}

}  // namespace

PYBIND11_MODULE(_latsym, m) {
    m.doc() = "Lie point symmetries of two-dimensional lattice equations";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<dsl::EvalError>(m, "EvalError", PyExc_ValueError);

    m.def("list_schemes", [] { return catalog::scheme_ids(); });
    m.def("run_cli", &run_cli, py::arg("args"),
          "Run the latsym command line with `args`; returns (exit_code, stdout, stderr).");
    m.def("leading_order_coefficients", &limit, py::arg("scheme"),
          py::arg("params") = std::map<std::string, std::string>{}, py::arg("probe") = std::string{});
    m.def("verify_change_of_variables", &change_of_variables, py::arg("c"), py::arg("printed") = false,
          py::arg("k") = 1.0);
    m.def("flow_point", &flow_point, py::arg("field"), py::arg("point"), py::arg("lam"),
          py::arg("substeps") = 1000, py::arg("params") = std::map<std::string, double>{},
          "Integrate the flow of a field given as `xi = ...; tau = ...; phi = ...`; returns (point, error).");
}
