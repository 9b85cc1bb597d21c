#include "doctest.h"

#include "ivpoly/matfun.hpp"
#include "ivpoly/stats.hpp"
#include "ivpoly/verify.hpp"

#include <cmath>
#include <functional>

using namespace ivp;

namespace {

double log_binomial(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

}  // namespace

TEST_CASE("down-right path vertices and parsing") {
  const DownRightPath p{{0, 2}, DownRightPath::parse_word("RDRD")};
  const auto v = p.vertices();
  REQUIRE(v.size() == 5);
  CHECK(v[1] == Point{1, 2});
  CHECK(v[2] == Point{1, 1});
  CHECK(v[4] == Point{2, 0});
  CHECK(DownRightPath::word_string(p.word) == "RDRD");
  CHECK(DownRightPath::parse_word("R,D") == std::vector<Step>{Step::Right, Step::Down});
  CHECK(DownRightPath::from_vertices(v).word == p.word);
  CHECK_THROWS_AS(DownRightPath::parse_word("RX"), ParameterError);
}

TEST_CASE("edge labels") {
  StripParams sp;
  sp.thetas = {1.7, 2.9};
  sp.regime = StripRegime::MaximalCurrent;
  CHECK(edge_labels(DownRightPath{{0, 0}, {Step::Right, Step::Right}}, sp) == std::vector<double>{1.7, 2.9});
  const QuadrantParams qp = QuadrantParams::homogeneous(2, 3.0, 0.5);
  CHECK(qp.alpha(1) == doctest::Approx(2.5));
  CHECK(qp.beta(7) == doctest::Approx(3.5));
  CHECK(edge_labels(DownRightPath{{0, 1}, {Step::Right, Step::Down}}, qp) == std::vector<double>{2.5, 3.5});
}

TEST_CASE("delta boundary first bulk value is the disorder") {
  const QuadrantParams qp = QuadrantParams::homogeneous(2, 2.0, 0.0);
  EvolveOptions opts;
  opts.keep_disorder = true;
  const QuadrantField f = quadrant_evolve(qp, delta_boundary(2, 3, 3), 3, 3, Seed(1), opts);
  CHECK((f.at(1, 1) - f.disorder(1, 1)).norm() < 1e-14);
  CHECK((f.disorder(2, 3) - quadrant_disorder(qp, 2, 3, Seed(1))).norm() == 0.0);
}

TEST_CASE("identity disorder counts paths") {
  QuadrantParams qp = QuadrantParams::homogeneous(2, 2.0, 0.0);
  qp.identity_disorder = true;
  const QuadrantField f = quadrant_evolve(qp, delta_boundary(2, 4, 4), 4, 4, Seed(1));
  CHECK((f.at(2, 2) - 2.0 * identity(2)).norm() < 1e-14);
  CHECK((f.at(4, 4) - 20.0 * identity(2)).norm() < 1e-12);
  CHECK(quadrant_delta_log_diag(qp, 40, Seed(1)) == doctest::Approx(2.0 * log_binomial(78, 39)).epsilon(1e-12));
}

TEST_CASE("d = 1 delta field equals the brute-force path sum") {
  const QuadrantParams qp = QuadrantParams::homogeneous(1, 2.0, 0.3);
  EvolveOptions opts;
  opts.keep_disorder = true;
  const QuadrantField f = quadrant_evolve(qp, delta_boundary(1, 3, 3), 3, 3, Seed(2), opts);
  // Every up-right path from (1,1) to (3,3); the delta source sits at (1,0).
  int paths = 0;
  std::function<double(long, long)> walk = [&](long n, long m) -> double {
    const double w = f.disorder(n, m)(0, 0);
    if (n == 3 && m == 3) {
      ++paths;
      return w;
    }
    double s = 0.0;
    if (n < 3) s += walk(n + 1, m);
    if (m < 3) s += walk(n, m + 1);
    return w * s;
  };
  const double brute = walk(1, 1);
  CHECK(paths == 6);
  CHECK(f.at(3, 3)(0, 0) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("one-step update at d = 1") {
  const OneStepResult r = one_step_update(Mat::Constant(1, 1, 2.0), Mat::Constant(1, 1, 3.0),
                                          Mat::Constant(1, 1, 0.5), Mat::Constant(1, 1, 1.9));
  CHECK(r.u_prime(0, 0) == doctest::Approx(3.5));
  CHECK(r.v_prime(0, 0) == doctest::Approx(12.0 / 7.0));
}

TEST_CASE("one-step identity in law at d = 2") {
  CHECK(one_step_identity(2, 3.0, 0.5, 20000, Seed(3)).passed);
}

TEST_CASE("path values") {
  const QuadrantParams qp = QuadrantParams::homogeneous(1, 2.0, 0.0);
  const QuadrantField f = quadrant_evolve(qp, delta_boundary(1, 2, 2), 2, 2, Seed(4));
  const auto single = path_values(f, DownRightPath{{1, 1}, {}});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == f.at(1, 1));
  const auto axis = path_values(f, DownRightPath{{0, 0}, {Step::Right, Step::Right}});
  CHECK(axis[1] == identity(1));
  CHECK(is_zero(axis[2]));
  CHECK_THROWS_AS(path_values(f, DownRightPath{{2, 2}, {Step::Right}}), ParameterError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(QuadrantParams::homogeneous(2, 0.2, 0.0).validate(2, 2), ParameterError);
  CHECK_THROWS_AS(QuadrantParams::homogeneous(2, 1.0, 0.8).validate_stationary(2, 2), ParameterError);
  StripParams sp;
  CHECK_THROWS_AS(sp.validate(), ParameterError);
}

TEST_CASE("martingale starts at the identity and has unit mean") {
  const MartingaleTrace t = point_to_line_martingale(2, 3.0, 6, Seed(5));
  CHECK((t.M[0] - identity(2)).norm() < 1e-14);
  REQUIRE(t.log_det_diag.size() == 3);
  const TestReport r = martingale_check(1, 3.0, 8, 20000, Seed(6));
  CHECK(r.passed);
  CHECK(r.notes.find("pathwise violations=0") != std::string::npos);
}

TEST_CASE("gauged delta diagonal equals the plain recurrence at d = 1") {
  const QuadrantParams qp = QuadrantParams::homogeneous(1, 2.0, 0.0);
  const QuadrantField f = quadrant_evolve(qp, delta_boundary(1, 20, 20), 20, 20, Seed(7));
  CHECK(quadrant_delta_log_diag(qp, 20, Seed(7)) == doctest::Approx(std::log(f.at(20, 20)(0, 0))).epsilon(1e-11));
}

TEST_CASE("gauged delta diagonal has the law of the plain recurrence at d = 2") {
  const QuadrantParams qp = QuadrantParams::homogeneous(2, 2.5, 0.0);
  std::vector<double> a, b;
  for (int r = 0; r < 3000; ++r) {
    a.push_back(quadrant_delta_log_diag(qp, 10, Seed(8, {static_cast<std::uint64_t>(r)})));
    const QuadrantField f = quadrant_evolve(qp, delta_boundary(2, 10, 10), 10, 10, Seed(9, {static_cast<std::uint64_t>(r)}));
    b.push_back(logdet(f.at(10, 10)));
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("strip raises") {
  const DownRightPath p{{0, 0}, {Step::Down, Step::Right}};
  CHECK(raise_kind(p, 0) == RaiseKind::None);
  CHECK(raise_kind(p, 1) == RaiseKind::Bulk);
  CHECK(raise_kind(p, 2) == RaiseKind::None);
  const DownRightPath flat{{0, 0}, {Step::Right, Step::Right}};
  CHECK(raise_kind(flat, 0) == RaiseKind::Left);
  const DownRightPath steep{{0, 0}, {Step::Down, Step::Down}};
  CHECK(raise_kind(steep, 2) == RaiseKind::Right);
}

TEST_CASE("strip with identity disorder sums neighbours") {
  StripParams sp;
  sp.d = 1;
  sp.thetas = {2.0, 2.0};
  sp.identity_disorder = true;
  StripState s{{{0, 0}, {Step::Right, Step::Right}}, {Mat::Constant(1, 1, 1), Mat::Constant(1, 1, 2), Mat::Constant(1, 1, 3)}};
  const auto out = strip_evolve(sp, s, 2, Seed(1));
  REQUIRE(out.size() == 2);
  // (1,1) <- Z(1,0); (2,1) <- Z(1,1) + Z(2,0); (3,1) <- Z(2,1).
  CHECK(out[0].values[0](0, 0) == doctest::Approx(2.0));
  CHECK(out[0].values[1](0, 0) == doctest::Approx(5.0));
  CHECK(out[0].values[2](0, 0) == doctest::Approx(5.0));
  CHECK(out[1].values[1](0, 0) == doctest::Approx(10.0));
  CHECK(out[1].path.start == Point{2, 2});
}

TEST_CASE("width-one strip alternates boundary weights") {
  StripParams sp;
  sp.d = 1;
  sp.thetas = {2.0};
  sp.u = 0.4;
  sp.v = 0.7;
  sp.regime = StripRegime::MaximalCurrent;
  StripState s{{{0, 0}, {Step::Right}}, {identity(1), identity(1)}};
  const auto out = strip_evolve(sp, s, 1, Seed(2));
  const Seed seed(2);
  const double left = strip_disorder(sp, 1, 1, seed)(0, 0);
  const double right = strip_disorder(sp, 2, 1, seed)(0, 0);
  CHECK(out[0].values[0](0, 0) == doctest::Approx(left * 1.0));
  CHECK(out[0].values[1](0, 0) == doctest::Approx(right * left));
}

TEST_CASE("d = 1 equilibrium strip keeps its increment law for one step") {
  StripParams sp;
  sp.d = 1;
  sp.thetas = {2.0, 2.0};
  sp.u = 0.3;
  sp.v = -0.3;
  const DownRightPath flat{{0, 0}, {Step::Right, Step::Right}};
  const auto labels = edge_labels(flat, sp);
  std::vector<double> a, b;
  for (int r = 0; r < 20000; ++r) {
    const Seed s(10, {static_cast<std::uint64_t>(r)});
    const StripState init = strip_equilibrium_initial(sp, flat, identity(1), s.child(0));
    const auto out = strip_evolve(sp, init, 1, s.child(1));
    a.push_back(logdet(out[0].values[1]) - logdet(out[0].values[0]));
    b.push_back(-std::log(Philox(s.child(2)).gamma(labels[0])));
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("strip log diagonal is finite for long runs at d = 2") {
  StripParams sp;
  sp.d = 2;
  sp.thetas = {2.5, 2.5};
  sp.u = 0.3;
  sp.v = -0.3;
  const double x = strip_log_diag(sp, 300, Seed(11));
  CHECK(std::isfinite(x));
  CHECK(x / 300.0 == doctest::Approx(-multidigamma(2, 2.2) - multidigamma(2, 2.8)).epsilon(0.1));
}
