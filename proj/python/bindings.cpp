#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "robust/cli.hpp"
#include "robust/config.hpp"
#include "robust/hamiltonian.hpp"
#include "robust/pde.hpp"
#include "robust/simulate.hpp"
#include "robust/strategy.hpp"
#include "robust/worst_case.hpp"

namespace py = pybind11;
using namespace robust;

namespace {

py::array_t<double> grid_array(const GridSpec& g, auto&& at) {
  py::array_t<double> out({g.n_t(), g.n_y()});
  auto view = out.mutable_unchecked<2>();
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_y(); ++j) view(i, j) = at(i, j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust HJBI solver for power utility under drift and volatility uncertainty";

  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<CoefficientFn>(m, "CoefficientFn")
      .def_static("constant", &CoefficientFn::constant, py::arg("value"))
      .def_static("smooth_ramp", &CoefficientFn::smooth_ramp, py::arg("left"), py::arg("right"),
                  py::arg("radius"))
      .def_static("piecewise_linear", &CoefficientFn::piecewise_linear, py::arg("knots"),
                  py::arg("radius"))
      .def("__call__", &CoefficientFn::value)
      .def("derivative", &CoefficientFn::derivative)
      .def_property_readonly("kind", [](const CoefficientFn& f) { return to_string(f.kind()); })
      .def_property_readonly("tail_radius", &CoefficientFn::tail_radius);

  py::class_<MarketModel>(m, "MarketModel")
      .def(py::init<CoefficientFn, CoefficientFn, CoefficientFn, double>(), py::arg("b"),
           py::arg("beta"), py::arg("r"), py::arg("rho"))
      .def_readonly("b", &MarketModel::b)
      .def_readonly("beta", &MarketModel::beta)
      .def_readonly("r", &MarketModel::r)
      .def_readonly("rho", &MarketModel::rho);

  py::class_<UncertaintyRectangle>(m, "UncertaintyRectangle")
      .def(py::init<double, double, double, double>(), py::arg("mu_minus"), py::arg("mu_plus"),
           py::arg("sigma_minus"), py::arg("sigma_plus"))
      .def_property_readonly("mu_minus", &UncertaintyRectangle::mu_minus)
      .def_property_readonly("mu_plus", &UncertaintyRectangle::mu_plus)
      .def_property_readonly("sigma_minus", &UncertaintyRectangle::sigma_minus)
      .def_property_readonly("sigma_plus", &UncertaintyRectangle::sigma_plus)
      .def_property_readonly("sigma_mid", &UncertaintyRectangle::sigma_mid);

  py::class_<PowerUtility>(m, "PowerUtility")
      .def(py::init<double>(), py::arg("q"))
      .def_property_readonly("q", &PowerUtility::q)
      .def("__call__", &PowerUtility::operator());

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<double, int, double, int, double>(), py::arg("horizon"), py::arg("n_t"),
           py::arg("y_radius"), py::arg("n_y"), py::arg("theta") = 0.5)
      .def_property_readonly("n_t", &GridSpec::n_t)
      .def_property_readonly("n_y", &GridSpec::n_y)
      .def_property_readonly("dt", &GridSpec::dt)
      .def_property_readonly("dy", &GridSpec::dy)
      .def("t", &GridSpec::t)
      .def("y", &GridSpec::y)
      .def("refined", &GridSpec::refined);

  py::class_<AssumptionViolation>(m, "AssumptionViolation")
      .def_readonly("assumption", &AssumptionViolation::assumption)
      .def_readonly("coefficient", &AssumptionViolation::coefficient)
      .def_readonly("witness_y", &AssumptionViolation::witness_y)
      .def_readonly("detail", &AssumptionViolation::detail);
  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("violations", &ValidationReport::violations)
      .def_readonly("points_checked", &ValidationReport::points_checked)
      .def_property_readonly("ok", &ValidationReport::ok);
  m.def("validate_assumptions", &validate_assumptions, py::arg("model"), py::arg("rect"),
        py::arg("samples") = 401);

  py::class_<WorstCaseMeasure>(m, "WorstCaseMeasure")
      .def_static("point", &WorstCaseMeasure::point)
      .def_static("bernoulli", &WorstCaseMeasure::bernoulli, py::arg("mu"), py::arg("sigma_lo"),
                  py::arg("sigma_hi"), py::arg("alpha"))
      .def_property_readonly("atoms",
                             [](const WorstCaseMeasure& nu) {
                               py::list out;
                               for (const auto& a : nu.atoms())
                                 out.append(py::make_tuple(a.mu, a.sigma, a.weight));
                               return out;
                             })
      .def_property_readonly("mean_mu", &WorstCaseMeasure::mean_mu)
      .def_property_readonly("mean_sigma", &WorstCaseMeasure::mean_sigma)
      .def_property_readonly("mean_sigma_sq", &WorstCaseMeasure::mean_sigma_sq);

  m.def("minimize_ratio",
        [](double b, double kappa, const UncertaintyRectangle& k) {
          const auto r = minimize_ratio(b, kappa, k);
          return py::make_tuple(r.measure, r.value, to_string(r.branch));
        },
        py::arg("b"), py::arg("kappa"), py::arg("rect"),
        "Returns (measure, value, branch name).");
  m.def("brute_force_min",
        [](double b, double kappa, const UncertaintyRectangle& k, int resolution) {
          const auto r = brute_force_min(b, kappa, k, resolution);
          return py::make_tuple(r.value, r.measure);
        },
        py::arg("b"), py::arg("kappa"), py::arg("rect"), py::arg("resolution") = 500);
  m.def("kappa_thresholds", [](double b, const UncertaintyRectangle& k) {
    const auto t = kappa_thresholds(b, k);
    return py::make_tuple(t.t1, t.t2, t.t3, t.t4);
  });
  m.def("psi_critical_points", &psi_critical_points);

  py::class_<DerivativeBundle>(m, "DerivativeBundle")
      .def(py::init([](double p1, double p2, double q11, double q12, double q22) {
             return DerivativeBundle{p1, p2, q11, q12, q22};
           }),
           py::arg("p1"), py::arg("p2"), py::arg("q11"), py::arg("q12"), py::arg("q22"));
  m.def("hamiltonian_point", &hamiltonian_point);
  m.def("hamiltonian_measure", &hamiltonian_measure);
  m.def("saddle_point",
        [](double x, double y, const DerivativeBundle& d, const MarketModel& mm,
           const UncertaintyRectangle& k) {
          const auto s = saddle_point(x, y, d, mm, k);
          py::object branch = py::none();
          if (s.branch) branch = py::str(to_string(*s.branch));
          return py::make_tuple(s.pi_star, s.nu_star, s.value, branch);
        },
        "Returns (pi_star, nu_star, value, branch or None).");

  py::class_<SolveDiagnostics>(m, "SolveDiagnostics")
      .def_readonly("time_steps", &SolveDiagnostics::time_steps)
      .def_readonly("max_residual", &SolveDiagnostics::max_residual)
      .def_readonly("max_abs_u_y", &SolveDiagnostics::max_abs_u_y)
      .def_readonly("max_gradient_cfl", &SolveDiagnostics::max_gradient_cfl);
  py::class_<ValueSurface>(m, "ValueSurface")
      .def_property_readonly("grid", &ValueSurface::grid)
      .def_readonly("diagnostics", &ValueSurface::diagnostics)
      .def_property_readonly("u", [](const ValueSurface& s) {
        return grid_array(s.grid(), [&](int i, int j) { return s.u(i, j); });
      })
      .def_property_readonly("u_y", [](const ValueSurface& s) {
        return grid_array(s.grid(), [&](int i, int j) { return s.u_y(i, j); });
      })
      .def("u_at", &ValueSurface::u_at, py::arg("t"), py::arg("y"));
  m.def("solve_hjbi", &solve_hjbi, py::arg("model"), py::arg("rect"), py::arg("utility"),
        py::arg("grid"), py::call_guard<py::gil_scoped_release>());
  m.def("residual_norm", &residual_norm);
  m.def("closed_form_b0", &closed_form_b0, py::arg("t"), py::arg("rect"), py::arg("q"),
        py::arg("horizon"));

  py::class_<PolicyField, std::shared_ptr<PolicyField>>(m, "PolicyField")
      .def_property_readonly("pi_frac", [](const PolicyField& pf) {
        return grid_array(pf.grid(), [&](int i, int j) { return pf.pi_frac(i, j); });
      })
      .def("fraction", &PolicyField::fraction)
      .def("measure", &PolicyField::measure)
      .def("branch", [](const PolicyField& pf, int i, int j) { return to_string(pf.branch(i, j)); });
  m.def("build_policy", [](const ValueSurface& s, const MarketModel& mm,
                           const UncertaintyRectangle& k, const PowerUtility& u) {
    return std::make_shared<PolicyField>(build_policy(s, mm, k, u));
  });
  m.def("value_function", &value_function, py::arg("surface"), py::arg("t"), py::arg("x"),
        py::arg("y"), py::arg("q"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_paths", &SimConfig::n_paths)
      .def_readwrite("n_steps", &SimConfig::n_steps)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("x0", &SimConfig::x0)
      .def_readwrite("y0", &SimConfig::y0)
      .def_readwrite("horizon", &SimConfig::horizon)
      .def_readwrite("threads", &SimConfig::threads);

  py::class_<PortfolioPolicy>(m, "PortfolioPolicy")
      .def_static("constant", &PortfolioPolicy::constant)
      .def_static("field",
                  [](std::shared_ptr<PolicyField> pf, double scale) {
                    return PortfolioPolicy::field(pf, scale);
                  },
                  py::arg("policy"), py::arg("scale") = 1.0)
      .def_property_readonly("label", &PortfolioPolicy::label);
  py::class_<AdversaryPolicy>(m, "AdversaryPolicy")
      .def_static("field", [](std::shared_ptr<PolicyField> pf) { return AdversaryPolicy::field(pf); })
      .def_static("chattering",
                  [](std::shared_ptr<PolicyField> pf) { return AdversaryPolicy::chattering(pf); })
      .def_static("point", &AdversaryPolicy::point)
      .def_static("measure", &AdversaryPolicy::measure)
      .def_property_readonly("label", &AdversaryPolicy::label);

  py::class_<UtilityEstimate>(m, "UtilityEstimate")
      .def_readonly("mean", &UtilityEstimate::mean)
      .def_readonly("std_error", &UtilityEstimate::std_error)
      .def_readonly("n_paths", &UtilityEstimate::n_paths)
      .def_readonly("min_terminal_wealth", &UtilityEstimate::min_terminal_wealth)
      .def_readonly("max_terminal_wealth", &UtilityEstimate::max_terminal_wealth);
  m.def("simulate_eu",
        [](const PortfolioPolicy& p, const AdversaryPolicy& a, const MarketModel& mm,
           const PowerUtility& u, const SimConfig& c) {
          py::gil_scoped_release release;
          return simulate_eu(p, a, mm, u, c);
        },
        py::arg("policy"), py::arg("adversary"), py::arg("model"), py::arg("utility"),
        py::arg("config"));

  py::class_<DeviationSpec>(m, "DeviationSpec")
      .def(py::init<>())
      .def_readwrite("random_points", &DeviationSpec::random_points)
      .def_readwrite("policy_scales", &DeviationSpec::policy_scales)
      .def_readwrite("seed", &DeviationSpec::seed)
      .def_readwrite("pde_tolerance", &DeviationSpec::pde_tolerance)
      .def_readwrite("chattering", &DeviationSpec::chattering);
  py::class_<SaddleFinding>(m, "SaddleFinding")
      .def_readonly("check", &SaddleFinding::check)
      .def_readonly("policy", &SaddleFinding::policy)
      .def_readonly("adversary", &SaddleFinding::adversary)
      .def_readonly("estimate", &SaddleFinding::estimate)
      .def_readonly("std_error", &SaddleFinding::std_error)
      .def_readonly("bound", &SaddleFinding::bound)
      .def_readonly("passed", &SaddleFinding::passed);
  py::class_<SaddleReport>(m, "SaddleReport")
      .def_readonly("pde_value", &SaddleReport::pde_value)
      .def_readonly("baseline", &SaddleReport::baseline)
      .def_readonly("findings", &SaddleReport::findings)
      .def_property_readonly("all_passed", &SaddleReport::all_passed);
  m.def("verify_saddle",
        [](const ValueSurface& s, std::shared_ptr<PolicyField> pf, const MarketModel& mm,
           const UncertaintyRectangle& k, const PowerUtility& u, const SimConfig& c,
           const DeviationSpec& d) {
          py::gil_scoped_release release;
          return verify_saddle(s, pf, mm, k, u, c, d);
        },
        py::arg("surface"), py::arg("policy"), py::arg("model"), py::arg("rect"),
        py::arg("utility"), py::arg("config"), py::arg("deviations") = DeviationSpec{});

  m.def("run_cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "robust-hjbi");
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(rc, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in-process; returns (exit code, stdout, stderr).");

  m.attr("__version__") = ROBUST_VERSION;
}
