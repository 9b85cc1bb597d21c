#include "doctest.h"

#include "ivpoly/matfun.hpp"
#include "ivpoly/sampling.hpp"

#include <cmath>
#include <numbers>

using namespace ivp;

TEST_CASE("multivariate gamma") {
  CHECK(multigamma_ln(1, 1.0) == doctest::Approx(0.0));
  CHECK(multigamma_ln(2, 1.0) == doctest::Approx(std::log(std::numbers::pi)).epsilon(1e-13));
  CHECK(multigamma_ln(2, 1.5) == doctest::Approx(std::log(std::numbers::pi / 2.0)).epsilon(1e-13));
  CHECK(multigamma_ln(3, 4.0) ==
        doctest::Approx(1.5 * std::log(std::numbers::pi) + std::lgamma(4.0) + std::lgamma(3.5) + std::lgamma(3.0)));
}

TEST_CASE("multivariate digamma") {
  constexpr double euler = 0.57721566490153286;
  CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-13));
  CHECK(multidigamma(1, 1.0) == doctest::Approx(-euler).epsilon(1e-13));
  CHECK(multidigamma(2, 1.5) == doctest::Approx((2.0 - euler - 2.0 * std::log(2.0)) - euler).epsilon(1e-12));
  CHECK(multidigamma(1, 2.0) == doctest::Approx(1.0 - euler).epsilon(1e-13));
  for (auto [d, theta] : {std::pair{3, 4.0}, std::pair{1, 0.3}, std::pair{6, 3.2}}) {
    const double h = 1e-4;
    const double fd = (multigamma_ln(d, theta + h) - multigamma_ln(d, theta - h)) / (2.0 * h);
    CHECK(std::abs(multidigamma(d, theta) - fd) < 1e-6);
  }
}

TEST_CASE("integrating the proposal density gives one exactly") {
  const ProposalSpec p(ProposalSpec::Kind::Wishart, 2.5, identity(2) * 1.3);
  const IntegralEstimate e = integrate_pd([&](const Mat& x) { return p.log_density(x); }, p, 1000, Seed(1));
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.std_error < 1e-12);
}

TEST_CASE("gig integral exact cases") {
  // P = 0 reduces to Γ_d(-a) |Q|^a.
  const Mat Q = identity(2) * 2.0;
  CHECK(gig_log_integral_exact(GigParams(-2.5, zeros(2), Q)) ==
        doctest::Approx(multigamma_ln(2, 2.5) - 2.5 * std::log(4.0)));
  CHECK(gig_log_integral_exact(GigParams(1.5, Q, zeros(2))) ==
        doctest::Approx(multigamma_ln(2, 1.5) - 1.5 * std::log(4.0)));
}

TEST_CASE("scalar Bessel-K value") {
  const IntegralEstimate e = kbessel(0.0, identity(1), identity(1), 100000, Seed(2));
  const double oracle = 2.0 * std::cyl_bessel_k(0.0, 2.0);
  CHECK(oracle == doctest::Approx(0.2278).epsilon(1e-3));
  CHECK(std::abs(e.value - oracle) < 3.0 * e.std_error);
  CHECK(kbessel_quad(0.0, 1.0, 1.0) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("Bessel-K sign symmetry with unimodular arguments") {
  const IntegralEstimate a = kbessel(0.6, identity(2), identity(2), 100000, Seed(3));
  const IntegralEstimate b = kbessel(-0.6, identity(2), identity(2), 100000, Seed(4));
  CHECK(std::abs(a.value - b.value) < 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("Whittaker function") {
  const IntegralEstimate e = whittaker2(1.0, 2.0, identity(1), identity(1) * 2.0, 100000, Seed(5));
  CHECK(std::abs(e.value - whittaker2_quad(1.0, 2.0, 1.0, 2.0)) < 3.0 * e.std_error);
  const Mat X1 = identity(2) * 1.4, X2 = identity(2) * 0.8;
  const IntegralEstimate a = whittaker2(1.7, 1.7, X1, X2, 100000, Seed(6));
  const IntegralEstimate b = whittaker2(1.7, 1.7, X1, X2, 100000, Seed(7));
  CHECK(std::abs(a.value - b.value) < 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("estimate_from_log_weights") {
  const IntegralEstimate e = estimate_from_log_weights({std::log(1.0), std::log(3.0)});
  CHECK(e.value == doctest::Approx(2.0));
  CHECK(e.std_error == doctest::Approx(1.0));
  CHECK(e.n_samples == 2);
}
