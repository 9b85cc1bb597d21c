#include "doctest.h"

#include "ivpoly/matfun.hpp"
#include "ivpoly/sampling.hpp"
#include "ivpoly/stats.hpp"
#include "ivpoly/verify.hpp"

#include <cmath>

using namespace ivp;

namespace {

// Scalar ∫_0^∞ g(x) dx/x by the trapezoid rule in log x.
template <class F>
double log_trapezoid(F g, double lo = -30.0, double hi = 30.0, int pts = 60001) {
  const double h = (hi - lo) / (pts - 1);
  double s = 0.0;
  for (int i = 0; i < pts; ++i) s += (i == 0 || i == pts - 1 ? 0.5 : 1.0) * g(std::exp(lo + i * h));
  return s * h;
}

std::vector<double> logdets(const std::vector<Mat>& xs) {
  std::vector<double> out;
  for (const Mat& x : xs) out.push_back(logdet(x));
  return out;
}

}  // namespace

TEST_CASE("Philox streams are reproducible and keyed by path") {
  Philox a(Seed(7, {1, 2})), b(Seed(7, {1, 2})), c(Seed(7, {2, 1}));
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    differs = differs || x != z;
  }
  CHECK(differs);
  CHECK(Seed(7).child(1, 2) == Seed(7, {1, 2}));
  CHECK(zigzag(0) == 0);
  CHECK(zigzag(-1) == 1);
  CHECK(zigzag(1) == 2);
}

TEST_CASE("Wishart d = 1 is Gamma(theta)") {
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(sample_wishart(1, 2.0, Seed(11, {static_cast<std::uint64_t>(i)}))(0, 0));
  CHECK(std::abs(mean(xs) - 2.0) < 4.0 * std_error(xs));
}

TEST_CASE("Wishart d = 2 mean and log-determinant") {
  Philox rng(Seed(12));
  std::vector<std::vector<double>> entries(3);
  std::vector<double> ld;
  for (int i = 0; i < 100000; ++i) {
    const Mat x = sample_wishart(2, 3.0, rng);
    entries[0].push_back(x(0, 0));
    entries[1].push_back(x(0, 1));
    entries[2].push_back(x(1, 1));
    ld.push_back(logdet(x));
  }
  CHECK(std::abs(mean(entries[0]) - 3.0) < 4.0 * std_error(entries[0]));
  CHECK(std::abs(mean(entries[1])) < 4.0 * std_error(entries[1]));
  CHECK(std::abs(mean(entries[2]) - 3.0) < 4.0 * std_error(entries[2]));
  CHECK(std::abs(mean(ld) - multidigamma(2, 3.0)) < 4.0 * std_error(ld));
}

TEST_CASE("inverse Wishart mean constant") {
  Philox rng(Seed(13));
  std::vector<double> tr;
  for (int i = 0; i < 100000; ++i) tr.push_back(sample_inv_wishart(3, 4.0, rng).trace() / 3.0);
  CHECK(std::abs(mean(tr) - inv_wishart_mean_constant(3, 4.0)) < 4.0 * std_error(tr));
}

TEST_CASE("shape constraint") {
  CHECK_THROWS_AS(sample_wishart(3, 0.9, Seed(1)), ParameterError);
  CHECK_NOTHROW(sample_wishart(3, 1.01, Seed(1)));
}

TEST_CASE("matrix GIG with P = 0 is an inverse Wishart draw") {
  const GigParams g(-3.0, zeros(1), identity(1));
  Philox rng(Seed(14));
  std::vector<double> xs, ys;
  Mat cur = identity(1);
  for (int i = 0; i < 20000; ++i) {
    cur = sample_matrix_gig(g, cur, 1, rng);
    xs.push_back(cur(0, 0));
    ys.push_back(sample_inv_wishart(1, 3.0, rng)(0, 0));
  }
  CHECK(ks_two_sample(xs, ys).p_value > 0.01);
}

TEST_CASE("matrix GIG chain mean at d = 1 against quadrature") {
  const GigParams g(0.0, identity(1), identity(1));
  auto dens = [](double x) { return std::exp(-x - 1.0 / x); };
  const double oracle = log_trapezoid([&](double x) { return x * dens(x); }) / log_trapezoid(dens);
  Philox rng(Seed(15));
  Mat cur = identity(1);
  std::vector<double> xs;
  for (int i = 0; i < 200000; ++i) {
    cur = sample_matrix_gig(g, cur, 1, rng);
    xs.push_back(cur(0, 0));
  }
  CHECK(std::abs(mean(xs) - oracle) < 4.0 * batch_means_se(xs));
  CHECK(gig_mean_quad(0.0, 1.0, 1.0) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("matrix GIG chain started in the target stays there") {
  const Mat P = identity(2) * 0.7, Q = identity(2) * 1.3;
  const GigParams g(0.4, P, Q);
  std::vector<double> start, after;
  for (int r = 0; r < 4000; ++r) {
    Philox rng(Seed(16, {static_cast<std::uint64_t>(r)}));
    Mat x = identity(2);
    for (int s = 0; s < 60; ++s) x = sample_matrix_gig(g, x, 1, rng);
    start.push_back(logdet(x));
    for (int s = 0; s < 100; ++s) x = sample_matrix_gig(g, x, 1, rng);
    after.push_back(logdet(x));
  }
  const double se = std::sqrt(2.0) * std_error(start);
  CHECK(std::abs(mean(start) - mean(after)) < 4.0 * se);
}

TEST_CASE("all-RIGHT walk log increments") {
  const std::vector<double> gammas{1.5, 2.0, 3.5};
  const WalkSpec spec{gammas, {Step::Right, Step::Right, Step::Right}, identity(1)};
  std::vector<double> xs;
  for (int r = 0; r < 50000; ++r) {
    const auto w = sample_walk(spec, Seed(17, {static_cast<std::uint64_t>(r)}));
    xs.push_back(logdet(w.back()) - logdet(w.front()));
  }
  double target = 0.0;
  for (double g : gammas) target -= digamma(g);
  CHECK(std::abs(mean(xs) - target) < 4.0 * std_error(xs));
}

TEST_CASE("single DOWN step is a Wishart draw") {
  const WalkSpec spec{{3.0}, {Step::Down}, identity(2)};
  std::vector<Mat> a, b;
  for (int r = 0; r < 20000; ++r) {
    a.push_back(sample_walk(spec, Seed(18, {static_cast<std::uint64_t>(r)}))[1]);
    b.push_back(sample_wishart(2, 3.0, Seed(19, {static_cast<std::uint64_t>(r)})));
  }
  CHECK(ks_two_sample(logdets(a), logdets(b)).p_value > 0.01);
}

TEST_CASE("walk increments are independent") {
  const WalkSpec spec{{2.0, 2.5}, {Step::Right, Step::Down}, identity(1)};
  std::vector<double> x1, x2;
  for (int r = 0; r < 40000; ++r) {
    const auto w = sample_walk(spec, Seed(20, {static_cast<std::uint64_t>(r)}));
    x1.push_back(logdet(w[1]) - logdet(w[0]));
    x2.push_back(logdet(w[2]) - logdet(w[1]));
  }
  CHECK(std::abs(correlation(x1, x2)) < 4.0 / std::sqrt(40000.0));
}

TEST_CASE("two-sided walk") {
  const Mat S0 = identity(2) * 1.7;
  const IndexedFamily f0 = sample_two_sided_walk(2.0, 2.0, S0, 0, 0, Seed(21));
  REQUIRE(f0.values.size() == 1);
  CHECK(f0.at(0) == S0);

  std::vector<double> fwd, bwd, ends;
  for (int r = 0; r < 20000; ++r) {
    const IndexedFamily f = sample_two_sided_walk(2.5, 2.5, identity(1), 3, 3, Seed(22, {static_cast<std::uint64_t>(r)}));
    fwd.push_back(logdet(f.at(1)) - logdet(f.at(0)));
    bwd.push_back(logdet(f.at(-1)) - logdet(f.at(0)));
    ends.push_back(logdet(f.at(3)) - logdet(f.at(0)));
  }
  CHECK(ks_two_sample(fwd, bwd).p_value > 0.01);
  CHECK(std::abs(mean(ends) + 3.0 * multidigamma(1, 2.5)) < 4.0 * std_error(ends));
}

TEST_CASE("stationary boundary") {
  const BoundarySpec spec{2, 3.0, 0.5, 2, std::nullopt};
  const IndexedFamily f = sample_stationary_boundary(spec, 3, 4, Seed(23));
  CHECK(f.at(-2) == identity(2));
  CHECK(f.kmin == -3);
  CHECK(f.kmax() == 4);

  const BoundarySpec s1{1, 2.0, 0.0, 2, std::nullopt};
  std::vector<double> inc, ref;
  for (int r = 0; r < 20000; ++r) {
    const IndexedFamily b = sample_stationary_boundary(s1, 2, 3, Seed(24, {static_cast<std::uint64_t>(r)}));
    inc.push_back(logdet(b.at(2)) - logdet(b.at(1)));
    ref.push_back(-std::log(Philox(Seed(25, {static_cast<std::uint64_t>(r)})).gamma(2.0)));
  }
  CHECK(ks_two_sample(inc, ref).p_value > 0.01);
}

TEST_CASE("delta boundary") {
  const IndexedFamily f = delta_boundary(2, 2, 3);
  CHECK(f.at(1) == identity(2));
  CHECK(is_zero(f.at(0)));
  CHECK(is_zero(f.at(3)));
  CHECK(is_zero(f.at(-2)));
}
