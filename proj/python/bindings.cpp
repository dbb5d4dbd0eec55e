#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jacobiwvn/band_structure.hpp"
#include "jacobiwvn/errors.hpp"
#include "jacobiwvn/operator_core.hpp"
#include "jacobiwvn/potential.hpp"
#include "jacobiwvn/resonance.hpp"
#include "jacobiwvn/simulate.hpp"

namespace py = pybind11;
using namespace jacobiwvn;

namespace {

const char* class_name(PointClass c) {
    switch (c) {
        case PointClass::Hyperbolic: return "hyperbolic";
        case PointClass::Elliptic: return "elliptic";
        case PointClass::Parabolic: return "parabolic";
    }
    return "hyperbolic";
}

ResonanceCase case_from_name(const std::string& name) {
    if (name == "case1") return ResonanceCase::Case1;
    if (name == "case2") return ResonanceCase::Case2;
    if (name == "case3") return ResonanceCase::Case3;
    throw ValidationError("case must be 'case1', 'case2' or 'case3'");
}

py::dict plan_to_dict(const ResonancePlan& p) {
    py::dict d;
    d["lambda"] = p.lambda;
    d["theta"] = p.theta;
    d["case"] = p.case_id == ResonanceCase::Case1   ? "case1"
                : p.case_id == ResonanceCase::Case2 ? "case2"
                                                    : "case3";
    d["k"] = p.k;
    d["omega"] = p.omega;
    d["phi"] = p.phi;
    d["E"] = p.E_value;
    d["exponent_per_c"] = p.decay_exponent_per_unit_c;
    d["c_threshold"] = p.c_threshold_l2;
    return d;
}

ResonancePlan plan_from_dict(const py::dict& d) {
    ResonancePlan p;
    p.lambda = d["lambda"].cast<double>();
    p.theta = d["theta"].cast<double>();
    p.case_id = case_from_name(d["case"].cast<std::string>());
    p.k = d["k"].cast<int>();
    p.omega = d["omega"].cast<double>();
    p.phi = d["phi"].cast<double>();
    p.E_value = d["E"].cast<cplx>();
    p.decay_exponent_per_unit_c = d["exponent_per_c"].cast<double>();
    p.c_threshold_l2 = d["c_threshold"].cast<double>();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Periodic Jacobi operators with decaying oscillatory perturbations";
#ifdef JACOBIWVN_VERSION
    m.attr("__version__") = JACOBIWVN_VERSION;
#endif

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_RuntimeError);

    py::class_<PeriodicOperator>(m, "PeriodicOperator")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("a"),
             py::arg("b"))
        .def_property_readonly("period", &PeriodicOperator::period)
        .def("a", &PeriodicOperator::a, py::arg("i"))
        .def("b", &PeriodicOperator::b, py::arg("i"))
        .def_property_readonly("a_values", &PeriodicOperator::a_values)
        .def_property_readonly("b_values", &PeriodicOperator::b_values);

    m.def("classify", [](const PeriodicOperator& op, double lam, double tol) {
              const SpectralPoint pt = classify(op, lam, tol);
              py::dict d;
              d["lambda"] = pt.lambda;
              d["class"] = class_name(pt.cls);
              d["trace"] = pt.trace;
              if (pt.theta) d["theta"] = *pt.theta;
              if (pt.mu) d["mu"] = *pt.mu;
              return d;
          },
          py::arg("op"), py::arg("lam"), py::arg("tol") = 1e-10);

    m.def("find_bands", [](const PeriodicOperator& op, int grid) {
              py::list out;
              for (const Band& b : find_bands(op, grid)) {
                  py::dict d;
                  d["index"] = b.index;
                  d["lo"] = b.lo;
                  d["hi"] = b.hi;
                  d["theta_direction"] =
                      b.theta_direction == ThetaDirection::Increasing ? "inc" : "dec";
                  out.append(d);
              }
              return out;
          },
          py::arg("op"), py::arg("grid") = 4096);

    m.def("quasi_momentum", &quasi_momentum, py::arg("op"), py::arg("lam"));

    m.def("plan_resonance",
          [](const PeriodicOperator& op, double lam, const std::string& case_name,
             std::optional<int> k, double phi) {
              CaseRequest req{case_from_name(case_name), k};
              return plan_to_dict(plan_resonance(op, classify(op, lam), req, phi));
          },
          py::arg("op"), py::arg("lam"), py::arg("case") = "case1",
          py::arg("k") = std::nullopt, py::arg("phi") = 0.0);

    py::class_<WvnPotential>(m, "WvnPotential")
        .def(py::init([](const std::vector<std::tuple<double, double, double>>& terms,
                         const std::map<std::int64_t, double>& overrides, double r) {
                 std::vector<WvnTerm> ts;
                 for (const auto& [c, omega, phi] : terms) ts.push_back({c, omega, phi});
                 return WvnPotential(std::move(ts), overrides, r);
             }),
             py::arg("terms"), py::arg("overrides") = std::map<std::int64_t, double>{},
             py::arg("r") = 0.0)
        .def("q", &WvnPotential::q, py::arg("n"))
        .def_property_readonly("r", &WvnPotential::r)
        .def_property_readonly("coupling_sum", &WvnPotential::coupling_sum);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("gamma", &FitResult::gamma)
        .def_readonly("stderr", &FitResult::stderr_)
        .def_readonly("window", &FitResult::window);

    py::class_<SolutionTrace>(m, "SolutionTrace")
        .def_readonly("lam", &SolutionTrace::lambda)
        .def_readonly("period", &SolutionTrace::period)
        .def_readonly("n_max", &SolutionTrace::n_max)
        .def_readonly("samples", &SolutionTrace::samples)
        .def_readonly("window_log_norms", &SolutionTrace::window_log_norms)
        .def_readonly("block_n", &SolutionTrace::block_n)
        .def_readonly("block_logamp", &SolutionTrace::block_logamp)
        .def_readonly("head", &SolutionTrace::head);

    m.def("iterate", &iterate, py::arg("op"), py::arg("potential"), py::arg("lam"),
          py::arg("head"), py::arg("N"), py::arg("stride") = 0,
          py::arg("rescale") = true);

    m.def("fit_decay_exponent", &fit_decay_exponent, py::arg("trace"), py::arg("n_lo"),
          py::arg("n_hi"));

    m.def("subordination_search",
          [](const PeriodicOperator& op, const WvnPotential& p, double lam,
             std::int64_t N, int psi_grid) {
              const SubordinationResult r = subordination_search(op, p, lam, N, psi_grid);
              py::dict d;
              d["psi"] = r.psi;
              d["head_sub"] = r.head_sub;
              d["head_generic"] = r.head_generic;
              d["final_ratio"] = r.final_ratio;
              d["ratio_dyadic"] = r.ratio_dyadic;
              d["verdict"] = r.verdict == SubordinationVerdict::Subordinate ? "Subordinate"
                             : r.verdict == SubordinationVerdict::NoSubordinate
                                 ? "NoSubordinate"
                                 : "Inconclusive";
              d["trace_sub"] = py::cast(r.trace_sub);
              d["trace_generic"] = py::cast(r.trace_generic);
              return d;
          },
          py::arg("op"), py::arg("potential"), py::arg("lam"), py::arg("N"),
          py::arg("psi_grid") = 720);

    m.def("boundedness_check", [](const SolutionTrace& tr) {
        const BoundednessResult r = boundedness_check(tr);
        py::dict d;
        d["verdict"] = r.verdict == TraceVerdict::Bounded    ? "Bounded"
                       : r.verdict == TraceVerdict::Decaying ? "Decaying"
                       : r.verdict == TraceVerdict::Growing  ? "Growing"
                                                             : "Undetermined";
        d["sup_ratio"] = r.sup_ratio;
        d["inf_ratio"] = r.inf_ratio;
        return d;
    });

    m.def("eigen_residual", &eigen_residual, py::arg("op"), py::arg("potential"),
          py::arg("lam"), py::arg("head"), py::arg("N"));

    m.def("embed_single",
          [](const PeriodicOperator& op, const py::dict& plan, double c,
             const SolutionTrace& trace, std::optional<double> q1,
             std::optional<double> q2_free) {
              const EmbeddingResult r =
                  embed_single(op, plan_from_dict(plan), c, trace, q1, q2_free);
              py::dict d;
              d["branch"] = r.branch;
              d["free_parameters"] = r.free_parameters;
              py::list heads;
              for (const EmbeddingHead& h : r.heads) {
                  py::dict hd;
                  hd["lambda"] = h.lambda;
                  hd["u"] = h.u;
                  heads.append(hd);
              }
              d["heads"] = heads;
              d["potential"] = py::cast(r.potential);
              return d;
          },
          py::arg("op"), py::arg("plan"), py::arg("c"), py::arg("trace"),
          py::arg("q1") = std::nullopt, py::arg("q2_free") = std::nullopt);

    m.def("zygmund_tail_bound_check", [](double alpha, std::int64_t n) {
        const ZygmundCheck c = zygmund_tail_bound_check(alpha, n);
        py::dict d;
        d["tail"] = c.tail;
        d["bound"] = c.bound;
        d["ok"] = c.ok;
        return d;
    });
}
