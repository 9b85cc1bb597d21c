#include "doctest.h"

#include "ivpoly/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace ivp;

namespace {

TestReport sample_report() {
  TestReport r;
  r.name = "one_step_identity";
  r.statistic = 0.1 + 0.2;
  r.threshold = 0.01;
  r.p_value = 0.7300000000000001;
  r.passed = true;
  r.n_samples = 100000;
  r.seed = Seed(42, {3, 1});
  r.notes = "d=2, \"quoted\", comma";
  return r;
}

}  // namespace

TEST_CASE("empty report list") {
  CHECK(reports_to_csv({}) == std::string(kReportHeader) + "\n");
  CHECK(reports_from_csv(reports_to_csv({})).empty());
}

TEST_CASE("one passing report") {
  const std::string csv = reports_to_csv({sample_report()});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find(",true,") != std::string::npos);
}

TEST_CASE("round trips") {
  TestReport b = sample_report();
  b.name = "martingale";
  b.p_value.reset();
  b.passed = false;
  b.statistic = std::numeric_limits<double>::infinity();
  b.seed = Seed(0);
  const std::vector<TestReport> list{sample_report(), b};
  CHECK(reports_from_json(reports_to_json(list)) == list);
  CHECK(reports_from_csv(reports_to_csv(list)) == list);
}

TEST_CASE("format_double reads back exactly") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("seed strings") {
  CHECK(parse_seed("17") == Seed(17));
  CHECK(parse_seed("17:2.0.5") == Seed(17, {2, 0, 5}));
  CHECK(parse_seed(Seed(9, {1, 2}).str()) == Seed(9, {1, 2}));
  CHECK_THROWS_AS(parse_seed("x"), ParameterError);
  CHECK_THROWS_AS(parse_seed("1:"), ParameterError);
}
