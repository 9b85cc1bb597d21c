#include "ivpoly/gibbs.hpp"
#include "ivpoly/matfun.hpp"
#include "ivpoly/polymer.hpp"
#include "ivpoly/report.hpp"
#include "ivpoly/verify.hpp"

#include "cli.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ivp;

namespace {

Seed to_seed(const py::object& s) {
  if (py::isinstance<py::int_>(s)) return Seed(s.cast<std::uint64_t>());
  return parse_seed(s.cast<std::string>());
}

py::dict report_dict(const TestReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["statistic"] = r.statistic;
  d["threshold"] = r.threshold;
  d["p_value"] = r.p_value ? py::cast(*r.p_value) : py::none();
  d["passed"] = r.passed;
  d["n_samples"] = r.n_samples;
  d["seed"] = r.seed.str();
  d["notes"] = r.notes;
  return d;
}

py::list report_list(const std::vector<TestReport>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(report_dict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_ivpoly, m) {
  m.doc() = "Directed polymers with inverse-Wishart matrix disorder";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("star", &star, py::arg("x"), py::arg("y"), "x * y = y^{1/2} x y^{1/2}");
  m.def("increment", &increment, py::arg("prev"), py::arg("next"));
  m.def("change_of_variable", &change_of_variable, py::arg("W"), py::arg("V"), py::arg("Y"));
  m.def("logdet", &logdet);
  m.def("multigamma_ln", &multigamma_ln, py::arg("d"), py::arg("theta"));
  m.def("multidigamma", &multidigamma, py::arg("d"), py::arg("theta"));

  m.def(
      "sample_wishart", [](int d, double theta, const py::object& seed) { return sample_wishart(d, theta, to_seed(seed)); },
      py::arg("d"), py::arg("theta"), py::arg("seed"));
  m.def(
      "sample_inv_wishart",
      [](int d, double theta, const py::object& seed) { return sample_inv_wishart(d, theta, to_seed(seed)); },
      py::arg("d"), py::arg("theta"), py::arg("seed"));

  m.def(
      "one_step_update",
      [](const Mat& U, const Mat& V, const Mat& W, const Mat& S) {
        const OneStepResult r = one_step_update(U, V, W, S);
        return py::make_tuple(r.u_prime, r.v_prime);
      },
      py::arg("U"), py::arg("V"), py::arg("W"), py::arg("S"));

  m.def(
      "quadrant_delta",
      [](int d, double theta, double u, long n, long m, const py::object& seed, bool identity_disorder) {
        QuadrantParams qp = QuadrantParams::homogeneous(d, theta, u);
        qp.identity_disorder = identity_disorder;
        const QuadrantField f =
            quadrant_evolve(qp, delta_boundary(d, static_cast<int>(m), static_cast<int>(n)), n, m, to_seed(seed));
        std::vector<std::vector<Mat>> out(static_cast<std::size_t>(n + 1));
        for (long i = 0; i <= n; ++i)
          for (long j = 0; j <= m; ++j) out[static_cast<std::size_t>(i)].push_back(f.at(i, j));
        return out;
      },
      py::arg("d"), py::arg("theta"), py::arg("u"), py::arg("n"), py::arg("m"), py::arg("seed"),
      py::arg("identity_disorder") = false, "Z[n][m] under the delta boundary");

  m.def(
      "strip_log_diag",
      [](int d, const std::vector<double>& thetas, double u, long n, const py::object& seed) {
        StripParams sp;
        sp.d = d;
        sp.thetas = thetas;
        sp.u = u;
        sp.v = -u;
        return strip_log_diag(sp, n, to_seed(seed));
      },
      py::arg("d"), py::arg("thetas"), py::arg("u"), py::arg("n"), py::arg("seed"));

  m.def(
      "normalization_n1",
      [](int d, double theta, double u, double v, long n, const py::object& seed) {
        StripParams sp;
        sp.d = d;
        sp.thetas = {theta};
        sp.u = u;
        sp.v = v;
        sp.regime = StripRegime::MaximalCurrent;
        const IntegralEstimate e = normalization_estimate(sp, {{0, 0}, {Step::Right}}, n, to_seed(seed));
        return py::make_tuple(e.value, e.std_error, std::exp(normalization_n1_log(d, theta, u, v)));
      },
      py::arg("d"), py::arg("theta"), py::arg("u"), py::arg("v"), py::arg("n"), py::arg("seed"),
      "(estimate, standard error, closed form)");

  m.def(
      "algebraic_checks",
      [](int d, long cases, const py::object& seed) { return report_list(algebraic_checks(d, cases, to_seed(seed))); },
      py::arg("d"), py::arg("cases"), py::arg("seed"));
  m.def(
      "one_step_identity",
      [](int d, double theta, double u, long replicates, const py::object& seed) {
        return report_dict(one_step_identity(d, theta, u, replicates, to_seed(seed)));
      },
      py::arg("d"), py::arg("theta"), py::arg("u"), py::arg("replicates"), py::arg("seed"));
  m.def(
      "martingale_check",
      [](int d, double theta, int k_max, long replicates, const py::object& seed) {
        return report_dict(martingale_check(d, theta, k_max, replicates, to_seed(seed)));
      },
      py::arg("d"), py::arg("theta"), py::arg("k_max"), py::arg("replicates"), py::arg("seed"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        const cli::RunConfig cfg = cli::parse_config(args);
        std::ostringstream out;
        const int code = cli::run(cfg, out);
        return py::make_tuple(code, out.str());
      },
      py::arg("args"), "Runs a CLI command in process; returns (exit code, output text).");
}
