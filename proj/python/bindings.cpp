#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvs/analysis.hpp"
#include "mvs/barriers.hpp"
#include "mvs/errors.hpp"
#include "mvs/experiment.hpp"
#include "mvs/special.hpp"

namespace py = pybind11;
using json = nlohmann::json;

namespace {

mvs::Point to_point(const std::vector<double>& v) {
    if (v.empty() || v.size() > static_cast<std::size_t>(mvs::kMaxDim)) throw mvs::ConfigError("point dimension out of range");
    return mvs::Point(std::span<const double>(v));
}

mvs::OperatorSpec make_operator(const std::string& family, double rho, int dim, double p, double s, double alpha,
                                double gamma, double lambda, double C, std::optional<std::string> f) {
    mvs::SchemeParams P;
    P.rho = rho;
    P.dim = dim;
    P.p = p;
    P.s = s;
    P.alpha = alpha;
    P.gamma = gamma;
    P.lambda = lambda;
    P.C = C;
    const mvs::Family fam = mvs::family_from_name(family);
    if (f) {
        const int pdim = fam == mvs::Family::heat ? dim + 1 : dim;
        const mvs::TestFunction tf = mvs::TestFunction::from_json(json::parse(*f), pdim);
        P.f = [tf](const mvs::Point& x) { return tf.value(x); };
        P.f_id = tf.id();
    }
    return mvs::OperatorSpec::make(fam, P);
}

mvs::FieldEval wrap(const py::function& fn) {
    return [fn](const mvs::Point& x) {
        py::gil_scoped_acquire gil;
        return fn(x.to_vector()).cast<double>();
    };
}

}  // namespace

PYBIND11_MODULE(_mvscheme, m) {
    m.doc() = "Monotone mean-value schemes: operators, solvers, barriers and rate analysis";

    py::register_exception<mvs::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<mvs::GeometryError>(m, "GeometryError", PyExc_ValueError);
    py::register_exception<mvs::InvariantError>(m, "InvariantError", PyExc_RuntimeError);

    py::class_<mvs::TestFunction>(m, "TestFunction")
        .def_static("from_json", [](const std::string& text, int dim) { return mvs::TestFunction::from_json(json::parse(text), dim); })
        .def("__call__", [](const mvs::TestFunction& t, const std::vector<double>& x) { return t.value(to_point(x)); })
        .def("gradient", [](const mvs::TestFunction& t, const std::vector<double>& x) { return t.gradient(to_point(x)).to_vector(); })
        .def("laplacian", [](const mvs::TestFunction& t, const std::vector<double>& x) { return t.laplacian(to_point(x)); })
        .def("frac_laplacian", [](const mvs::TestFunction& t, const std::vector<double>& x, double s) {
            return t.frac_laplacian(to_point(x), s);
        })
        .def("to_json", [](const mvs::TestFunction& t) { return t.to_json().dump(); })
        .def_property_readonly("id", &mvs::TestFunction::id);

    py::class_<mvs::OperatorSpec>(m, "OperatorSpec")
        .def(py::init(&make_operator), py::arg("family"), py::arg("rho"), py::arg("dim") = 1, py::arg("p") = 2.0,
             py::arg("s") = 0.5, py::arg("alpha") = 0.5, py::arg("gamma") = 1.0, py::arg("lam") = 0.0,
             py::arg("C") = 0.0, py::arg("f") = std::nullopt)
        .def("with_rho", &mvs::OperatorSpec::with_rho)
        .def_property_readonly("family", [](const mvs::OperatorSpec& o) { return mvs::family_name(o.family()); })
        .def_property_readonly("rho", &mvs::OperatorSpec::rho)
        .def_property_readonly("coefficient", &mvs::OperatorSpec::coefficient)
        .def_property_readonly("radius", &mvs::OperatorSpec::radius)
        .def_property_readonly("implicit_C", &mvs::OperatorSpec::implicit_C)
        .def_property_readonly("tail_bound", &mvs::OperatorSpec::tail_bound);

    m.def("eval_scheme", [](const mvs::OperatorSpec& op, const std::vector<double>& x, const mvs::TestFunction& phi, double s) {
        return mvs::eval_scheme(op, to_point(x), [&phi](const mvs::Point& y) { return phi.value(y); }, s);
    });
    m.def("eval_scheme", [](const mvs::OperatorSpec& op, const std::vector<double>& x, const py::function& phi, double s) {
        return mvs::eval_scheme(op, to_point(x), wrap(phi), s);
    });
    m.def("eval_mean", [](const mvs::OperatorSpec& op, const std::vector<double>& x, const mvs::TestFunction& phi) {
        return mvs::eval_mean(op, to_point(x), [&phi](const mvs::Point& y) { return phi.value(y); });
    });
    m.def("eval_mean", [](const mvs::OperatorSpec& op, const std::vector<double>& x, const py::function& phi) {
        return mvs::eval_mean(op, to_point(x), wrap(phi));
    });
    m.def("solve_implicit_root", [](const std::vector<double>& values, const std::vector<double>& weights, double p,
                                    double c_over_rho, double f, double tol) {
        return mvs::solve_implicit_root(values, weights, p, c_over_rho, f, tol, 200);
    }, py::arg("values"), py::arg("weights"), py::arg("p"), py::arg("c_over_rho"), py::arg("f") = 0.0, py::arg("tol") = 1e-12);

    m.def("fit_rate", [](const std::vector<std::pair<double, double>>& pairs) {
        const mvs::RateFit r = mvs::fit_rate(pairs);
        return py::dict(py::arg("slope") = r.slope, py::arg("intercept") = r.intercept, py::arg("residual") = r.residual,
                        py::arg("sentinel") = r.sentinel, py::arg("note") = r.note);
    });

    m.def("frac_laplacian_constant", &mvs::special::frac_laplacian_constant, py::arg("dim"), py::arg("s"));
    m.def("frac_barrier_constant", &mvs::special::frac_barrier_constant, py::arg("dim"), py::arg("s"));
    m.def("implicit_p_moment_constant", &mvs::special::implicit_p_moment_constant, py::arg("dim"), py::arg("p"));

    m.def("run_json", [](const std::string& config, bool strict) {
        const json resolved = mvs::resolve_config(json::parse(config));
        mvs::RunOutput r;
        {
            py::gil_scoped_release release;
            r = mvs::run_experiment(resolved, strict);
        }
        return py::make_tuple(r.status, r.report.dump(), r.csv);
    }, py::arg("config"), py::arg("strict") = false);
}
