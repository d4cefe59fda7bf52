#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmcspec/grassmann.hpp"
#include "cmcspec/whitham.hpp"

namespace py = pybind11;
using namespace cmcspec;

namespace {

CurveSpec spec_of(const std::vector<cplx>& eta) { return {static_cast<int>(eta.size()), eta}; }

QuadConfig quad_of(int nodes, double qtol) { return {nodes, qtol, 16384}; }

py::dict report_dict(const InvariantReport& r) {
  py::dict d;
  d["genus"] = r.genus;
  d["deg_f"] = r.deg_f;
  d["gcd_degree"] = r.gcd_degree;
  d["gcd_roots"] = r.gcd_roots;
  d["lambda0"] = r.s1_roots;
  d["winding"] = r.winding_arg;
  d["winding_roots"] = r.winding_roots;
  d["stratum"] = r.label();
  d["parity_ok"] = r.parity_ok;
  d["range_ok"] = r.range_ok;
  d["corollary_ok"] = r.corollary_ok;
  return d;
}

GrPlane plane_of(const Eigen::MatrixXd& M) {
  if (M.cols() != 2 && M.size() != 0) throw ValidationError("plane matrix must be g×2");
  return {static_cast<int>(M.rows()), M.rows() ? M : Eigen::MatrixXd(0, 2)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spectral curves of finite-type CMC planes";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ArithmeticError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  py::class_<CPoly>(m, "CPoly")
      .def(py::init<std::vector<cplx>>())
      .def("coeffs", &CPoly::coeffs)
      .def("degree", &CPoly::degree)
      .def("__call__", [](const CPoly& p, cplx z) { return p(z); })
      .def("__repr__", [](const CPoly& p) { return "CPoly(degree=" + std::to_string(p.degree()) + ")"; });

  m.def("roots", [](const std::vector<cplx>& c, double tol) { return roots(CPoly(c), tol); }, py::arg("coeffs"),
        py::arg("tol") = kDefaultTol);
  m.def("approx_gcd",
        [](const std::vector<cplx>& p, const std::vector<cplx>& q, double tol) {
          const CPoly g = approx_gcd(CPoly(p), CPoly(q), tol);
          return g.with_degree(g.effective_degree(0.0)).coeffs();
        },
        py::arg("p"), py::arg("q"), py::arg("tol") = kDefaultTol);
  m.def("is_rho_real", [](const std::vector<cplx>& c, double tol) { return reality_check(CPoly(c), tol).is_real; },
        py::arg("coeffs"), py::arg("tol") = kDefaultTol);

  py::class_<SpectralCurve>(m, "SpectralCurve")
      .def_property_readonly("genus", &SpectralCurve::genus)
      .def_property_readonly("eta", [](const SpectralCurve& c) { return c.spec.eta; })
      .def_property_readonly("a", [](const SpectralCurve& c) { return c.a.coeffs(); })
      .def_property_readonly("branch_points", [](const SpectralCurve& c) { return c.branch_points; });

  m.def("build_curve", [](const std::vector<cplx>& eta, double tol) { return build_curve(spec_of(eta), tol); },
        py::arg("eta"), py::arg("tol") = kDefaultTol);

  py::class_<PencilBasis>(m, "PencilBasis")
      .def_property_readonly("curve", [](const PencilBasis& p) { return p.curve; })
      .def_property_readonly("b1", [](const PencilBasis& p) { return p.b1.coeffs(); })
      .def_property_readonly("b2", [](const PencilBasis& p) { return p.b2.coeffs(); })
      .def_readonly("kernel_gap", &PencilBasis::kernel_gap)
      .def("a_periods", [](const PencilBasis& p, const std::vector<cplx>& b) { return a_periods(p.rules, CPoly(b)); })
      .def("b_periods", [](const PencilBasis& p, const std::vector<cplx>& b) { return b_periods(p.rules, CPoly(b)); })
      .def("element", [](const PencilBasis& p, cplx z) { return pencil_element(p, z).coeffs(); });

  m.def("solve_Ba",
        [](const std::vector<cplx>& eta, int nodes, double qtol, double tol) {
          return solve_Ba(build_curve(spec_of(eta), tol), quad_of(nodes, qtol), tol);
        },
        py::arg("eta"), py::arg("quad_nodes") = 64, py::arg("quad_tol") = 1e-10, py::arg("tol") = kDefaultTol);
  m.def("classify", [](const PencilBasis& p, double tol) { return report_dict(classify(p, tol)); }, py::arg("basis"),
        py::arg("tol") = kDefaultTol);
  m.def("classify_pair",
        [](int g, const std::vector<cplx>& b1, const std::vector<cplx>& b2, double tol) {
          return report_dict(classify_pair(g, CPoly(b1), CPoly(b2), tol));
        },
        py::arg("genus"), py::arg("b1"), py::arg("b2"), py::arg("tol") = kDefaultTol);
  m.def("f_tilde", [](const PencilBasis& p, cplx z) { return f_tilde(p, z); });
  m.def("sym_integral", [](const PencilBasis& p, const std::vector<cplx>& b, cplx l0) {
    return sym_integral(p.curve, CPoly(b), l0);
  });
  m.def("phi_map", [](const PencilBasis& p, cplx l0) { return phi_map(p, l0); });
  m.def("rational_plane_distance", &rational_plane_distance, py::arg("rows"), py::arg("maxden") = 12);

  m.def("rotation_residuals", [](const PencilBasis& p) {
    const WhithamTangent t = rotation_tangent(p);
    return std::vector<double>{t.bezout_residual, t.derivative_residual, t.compatibility_residual};
  });
  m.def("whitham_residuals",
        [](const PencilBasis& p, const std::vector<cplx>& q, double tol) {
          const WhithamTangent t = whitham_tangent(p, CPoly(q), tol);
          return std::vector<double>{t.bezout_residual, t.derivative_residual, t.compatibility_residual};
        },
        py::arg("basis"), py::arg("q"), py::arg("tol") = kDefaultTol);
  m.def("handle_check",
        [](const PencilBasis& p, double angle, double t) {
          const HandleCheck h = handle_invariant_check(p, std::polar(1.0, angle), t);
          py::dict d;
          d["deg_f_before"] = h.deg_f_before;
          d["deg_f_after"] = h.deg_f_after;
          d["winding_before"] = h.winding_before;
          d["winding_after"] = h.winding_after;
          d["rate_at_alpha"] = h.rate_at_alpha;
          d["new_s1_critical_points"] = h.new_s1_critical_points;
          d["eta"] = h.deformation.curve.spec.eta;
          return d;
        },
        py::arg("basis"), py::arg("alpha_angle"), py::arg("t"));
  m.def("flow",
        [](const std::vector<cplx>& eta, const std::vector<cplx>& q, double dt, int steps) {
          const CPoly Q(q);
          const FlowResult r = flow(build_curve(spec_of(eta)), [&](const FlowState&, double) { return Q; }, dt, steps);
          py::dict d;
          std::vector<std::vector<cplx>> path;
          std::vector<double> drift;
          for (const auto& rec : r.records) {
            path.push_back(rec.state.eta);
            drift.push_back(rec.drift);
          }
          d["eta"] = path;
          d["drift"] = drift;
          d["aborted"] = r.aborted;
          d["message"] = r.message;
          return d;
        },
        py::arg("eta"), py::arg("q"), py::arg("dt") = 1e-3, py::arg("steps") = 10);

  m.def("plane_basis", [](const Eigen::MatrixXd& M) {
    const auto [b1, b2] = plane_basis(plane_of(M));
    return std::make_pair(b1.coeffs(), b2.coeffs());
  });
  m.def("gr_classify",
        [](const Eigen::MatrixXd& M, double tol) {
          const GrClass c = gr_classify(plane_of(M), tol);
          py::dict d;
          d["gcd_degree"] = c.gcd_degree;
          d["in_R"] = c.in_R;
          d["in_S"] = c.in_S;
          d["lambda0"] = c.s1_roots;
          return d;
        },
        py::arg("M"), py::arg("tol") = kDefaultTol);
  m.def("stratum_probe",
        [](const Eigen::MatrixXd& M, double radius) {
          const StratumProbe p = stratum_dimension_probe(plane_of(M), radius);
          py::dict d;
          d["dimension"] = p.dimension;
          d["dimension_fine"] = p.dimension_fine;
          d["sheets"] = p.sheets;
          d["singular"] = p.singular;
          return d;
        },
        py::arg("M"), py::arg("radius") = 1e-3);
  m.def("B_map", [](const PencilBasis& p) { return B_map(p).M; });
  m.def("immersion_rank", [](const std::vector<cplx>& eta, double h) {
    return immersion_rank(build_curve(spec_of(eta)), h).rank;
  }, py::arg("eta"), py::arg("fd_step") = 1e-4);
}
