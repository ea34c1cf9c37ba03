#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccgeo/arnold.hpp"
#include "ccgeo/pipeline.hpp"
#include "ccgeo/quadforms.hpp"

namespace py = pybind11;
using namespace ccgeo;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    auto mod = py::module::import("json");
    return mod.attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_ccgeo, m) {
    m.doc() = "convex-concave counterexample construction";

    py::class_<Signature>(m, "Signature")
        .def(py::init<int, int, int>(), py::arg("plus"), py::arg("minus"), py::arg("zero") = 0)
        .def_readonly("plus", &Signature::plus)
        .def_readonly("minus", &Signature::minus)
        .def_readonly("zero", &Signature::zero)
        .def("__repr__", [](const Signature& s) {
            return "Signature(" + std::to_string(s.plus) + "," + std::to_string(s.minus) + "," +
                   std::to_string(s.zero) + ")";
        });

    py::class_<QuadraticForm>(m, "QuadraticForm")
        .def(py::init<const Eigen::MatrixXd&>())
        .def("__call__", [](const QuadraticForm& q, const Eigen::VectorXd& x) { return q(x); })
        .def("matrix", &QuadraticForm::matrix)
        .def("nondegenerate", &QuadraticForm::nondegenerate);
    m.def("standard_form", &standard_form);
    m.def("signature_of", &signature_of);
    m.def("dual_form", &dual_form);
    m.def("dual_value", &dual_value);
    m.def("restrict_to_hyperplane", &restrict_to_hyperplane);
    m.def("predict_restricted_signature", &predict_restricted_signature);

    py::class_<Certificate>(m, "Certificate")
        .def_readonly("name", &Certificate::name)
        .def_readonly("pass_", &Certificate::pass)
        .def_readonly("margin", &Certificate::margin)
        .def_readonly("witness", &Certificate::witness)
        .def("to_dict", [](const Certificate& c) { return json_to_py(c.to_json()); });

    py::class_<StripModel>(m, "StripModel")
        .def_readonly("scale", &StripModel::scale)
        .def("support", &StripModel::support)
        .def("perp_displacement", &StripModel::perp_displacement)
        .def("to_dict", [](const StripModel& s) { return json_to_py(s.to_json()); });
    m.def("build_strip", &build_strip, py::arg("m") = 8, py::arg("h_max") = 1e-3,
          py::arg("z_max") = 4.0);
    m.def("strip_invariants_certificate", &strip_invariants_certificate);
    m.def("strip_cc_certificate", &strip_cc_certificate, py::arg("strip"),
          py::arg("n_theta") = 256);
    m.def("rho_nonproportionality", &rho_nonproportionality);

    py::class_<SupportField>(m, "SupportField")
        .def("n_z", &SupportField::n_z)
        .def("n_theta", &SupportField::n_theta)
        .def("eval", &SupportField::eval)
        .def("curvature", &SupportField::curvature)
        .def("save_binary", &SupportField::save_binary)
        .def_static("load_binary", &SupportField::load_binary);
    m.def("z_convexity_certificate", &z_convexity_certificate);
    m.def("curvature_certificate", &curvature_certificate);
    m.def("glued_support", &glued_support);
    m.def("strip_field", &strip_field);
    m.def("glued_field", &glued_field);

    py::class_<Line3>(m, "Line3")
        .def(py::init([](double a, double b, double c, double d) {
                 return Line3{a, b, c, d};
             }),
             py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"))
        .def_readonly("a", &Line3::a)
        .def_readonly("b", &Line3::b)
        .def_readonly("c", &Line3::c)
        .def_readonly("d", &Line3::d);
    m.def("section_distance", &section_distance);
    m.def("strip_maxdist", [](const StripModel& s, const Line3& l, double z_lo, double z_hi) {
        return maxdist(l, strip_sections(s), z_lo, z_hi);
    });
    m.def("strip_line_search", [](const StripModel& s, double window, int restarts,
                                  uint64_t seed) {
        LineSearchResult r = line_search(strip_sections(s), -window, window, 1.0, restarts, seed);
        return json_to_py(r.to_json());
    }, py::arg("strip"), py::arg("window") = 10.0, py::arg("restarts") = 8, py::arg("seed") = 1);

    m.def("arnold_certificate", &arnold_certificate, py::arg("A"), py::arg("n_lines"),
          py::arg("seed"), py::arg("disc_tol") = 1e-6);
    m.def("hyperbolic_quadric", &hyperbolic_quadric);
    m.def("duality_involution_error", &duality_involution_error);

    py::class_<PipelineConfig>(m, "PipelineConfig").def(py::init<>());
    m.def("run_pipeline", [](const PipelineConfig& cfg) {
        PipelineResult r = run_pipeline(cfg, nullptr);
        return json_to_py(r.report);
    });
}
