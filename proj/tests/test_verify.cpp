#include "doctest.h"

#include "ivpoly/matfun.hpp"
#include "ivpoly/verify.hpp"

#include <cmath>

using namespace ivp;

TEST_CASE("two-sample test on identical lists") {
  const std::vector<double> xs{0.3, 1.2, -0.7, 2.2, 0.0};
  const TestReport r = two_sample_test(xs, xs, 0.01);
  CHECK(r.statistic == 0.0);
  CHECK(r.passed);
}

TEST_CASE("calibration: size and power") {
  int passes = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto reps = calibration_reports(Seed(s), 10000);
    passes += reps[0].passed ? 1 : 0;
    CHECK(reps[1].passed);
  }
  CHECK(passes >= 18);

  std::vector<double> a, b;
  Philox ra(Seed(40)), rb(Seed(41));
  for (int i = 0; i < 10000; ++i) {
    a.push_back(ra.gamma(2.0));
    b.push_back(rb.gamma(3.0));
  }
  CHECK_FALSE(two_sample_test(a, b, 0.01).passed);
}

TEST_CASE("compare_estimates") {
  CHECK(compare_estimates("x", 1.0, 0.1, 1.2, 0.0, 3.0, 10, Seed(1)).passed);
  CHECK_FALSE(compare_estimates("x", 1.0, 0.1, 1.5, 0.0, 3.0, 10, Seed(1)).passed);
  const TestReport r = compare_estimates("x", 1.0, 0.3, 1.5, 0.4, 3.0, 10, Seed(1));
  CHECK(r.statistic == doctest::Approx(1.0));
}

TEST_CASE("expectation identity targets") {
  CHECK(-2.0 * multidigamma(1, 2.0) == doctest::Approx(-0.8456).epsilon(1e-4));
  const TestReport zero = expectation_identity(1, 2.0, 0.0, 2, 0, 0, 50, Seed(2));
  CHECK(zero.statistic == 0.0);
  CHECK(zero.passed);
  CHECK(expectation_identity(1, 2.0, 0.0, 2, 1, 1, 20000, Seed(3)).passed);
  CHECK(expectation_identity(2, 3.0, 0.5, 1, 2, 1, 20000, Seed(4)).passed);
}

TEST_CASE("quadrant stationarity along a staircase") {
  QuadrantStationarityConfig cfg;
  cfg.d = 2;
  cfg.theta = 3.0;
  cfg.u = 0.5;
  cfg.M = 1;
  cfg.paths = {DownRightPath{{0, 1}, {Step::Right, Step::Down}}};
  cfg.replicates = 20000;
  CHECK(stationarity_quadrant(cfg, Seed(5)).passed);
  cfg.d = 1;
  cfg.theta = 2.0;
  cfg.u = 0.0;
  CHECK(stationarity_quadrant(cfg, Seed(6)).passed);
  cfg.paths = {DownRightPath{{1, 1}, {Step::Down}}};
  CHECK_THROWS_AS(stationarity_quadrant(cfg, Seed(6)), ParameterError);
}

TEST_CASE("strip equilibrium stationarity") {
  StripStationarityConfig cfg;
  cfg.params.d = 1;
  cfg.params.thetas = {2.0, 2.0};
  cfg.params.u = 0.3;
  cfg.params.v = -0.3;
  cfg.bottom_word = {Step::Down, Step::Down};
  cfg.replicates = 10000;
  CHECK(stationarity_strip_equilibrium(cfg, Seed(7)).passed);
  cfg.params.d = 2;
  cfg.params.thetas = {1.8, 2.2};
  cfg.params.u = 0.2;
  cfg.params.v = -0.2;
  CHECK(stationarity_strip_equilibrium(cfg, Seed(8)).passed);

  cfg.bottom_word = {Step::Right, Step::Right};
  const TestReport none = stationarity_strip_equilibrium(cfg, Seed(9));
  CHECK(none.passed);
  CHECK(none.n_samples == 0);
}

TEST_CASE("deterministic identities") {
  for (int d : {1, 3}) {
    const auto reps = algebraic_checks(d, 1000, Seed(10));
    CHECK(reps.size() == 5);
    CHECK(all_passed(reps));
  }
}

TEST_CASE("free energy at small size") {
  const QuadrantParams qp = QuadrantParams::homogeneous(1, 2.0, 0.0);
  const FreeEnergyResult r = free_energy(FreeEnergyModel::QuadrantDelta, &qp, nullptr, 64, 40, Seed(11));
  CHECK(r.estimate.samples.size() == 40);
  CHECK(r.target == doctest::Approx(-2.0 * multidigamma(1, 2.0)));
  CHECK(r.report.threshold == doctest::Approx(0.05 + 4.0 * r.estimate.std_error));

  const QuadrantParams q3 = QuadrantParams::homogeneous(3, 2.0, 0.0);
  const FreeEnergyResult d3 = free_energy(FreeEnergyModel::QuadrantDelta, &q3, nullptr, 16, 4, Seed(12));
  CHECK(d3.report.passed);
  CHECK(d3.report.notes.find("descriptive") != std::string::npos);
}

TEST_CASE("functionals") {
  Mat x(2, 2);
  x << 2, 0, 0, 4;
  const auto f = functionals(x);
  CHECK(f[0] == doctest::Approx(std::log(8.0)));
  CHECK(f[1] == doctest::Approx(6.0));
  CHECK(f[2] == doctest::Approx(0.75));
  CHECK(f[3] == doctest::Approx(4.0));
}
