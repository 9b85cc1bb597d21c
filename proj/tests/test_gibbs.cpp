#include "doctest.h"

#include "ivpoly/matfun.hpp"
#include "ivpoly/stats.hpp"
#include "ivpoly/verify.hpp"

#include <cmath>

using namespace ivp;

namespace {

Mat sc(double x) { return Mat::Constant(1, 1, x); }

// E[log x] for the scalar density x^a e^{-px-q/x} dx/x, trapezoid in log x.
double scalar_gig_log_mean(double a, double p, double q) {
  double z = 0.0, m = 0.0;
  const int pts = 40001;
  const double lo = -25.0, hi = 25.0, h = (hi - lo) / (pts - 1);
  for (int i = 0; i < pts; ++i) {
    const double t = lo + i * h, x = std::exp(t);
    const double w = std::exp(a * t - p * x - q / x);
    z += w;
    m += t * w;
  }
  return m / z;
}

std::vector<double> logdets(const std::vector<Mat>& xs) {
  std::vector<double> out;
  for (const Mat& x : xs) out.push_back(logdet(x));
  return out;
}

}  // namespace

TEST_CASE("two-layer graph structure and weights") {
  const DownRightPath path{{0, 0}, {Step::Right, Step::Down, Step::Right}};
  const TwoLayerGraph g = TwoLayerGraph::build(path, {1.5, 2.0, 2.5}, 0.4, 0.6);
  CHECK(g.edges.size() == 2 + 3 * 3);
  for (int d : {1, 3}) {
    const TwoLayerConfig c = TwoLayerConfig::constant(4, identity(d));
    CHECK(log_weight(c, g) == doctest::Approx(-3.0 * d * 3));
  }
  CHECK(edge_log_weight(sc(1.0), sc(2.0), 2.0, true) == doctest::Approx(2.0 * std::log(2.0) - 2.0));
  CHECK(edge_log_weight(sc(1.0), sc(2.0), 2.0, true) == doctest::Approx(-0.6137).epsilon(1e-3));
}

TEST_CASE("log weight is translation invariant") {
  Philox rng(Seed(1));
  const DownRightPath path{{0, 0}, {Step::Down, Step::Right}};
  const TwoLayerGraph g = TwoLayerGraph::build(path, {1.5, 2.0}, 0.4, 0.6);
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 4;
    TwoLayerConfig c;
    for (int k = 0; k < 3; ++k) {
      c.lambda1.push_back(random_spd(d, rng));
      c.lambda2.push_back(random_spd(d, rng));
    }
    const Mat x = random_spd(d, rng);
    const double a = log_weight(c, g), b = log_weight(c.star_all(x), g);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("psi factor") {
  CHECK(psi_factor(1.3, {identity(2), identity(2)}, {identity(2), identity(2)}) == doctest::Approx(-6.0));
  CHECK(psi_factor(1.0, {sc(1), sc(1)}, {sc(2), sc(2)}) == doctest::Approx(2.0 * std::log(2.0) - 4.5));
  // The elementary cell of a single RIGHT step, read from the graph.
  Philox rng(Seed(2));
  const MatPair lam{random_spd(2, rng), random_spd(2, rng)}, mu{random_spd(2, rng), random_spd(2, rng)};
  const TwoLayerGraph g = TwoLayerGraph::build(DownRightPath{{0, 0}, {Step::Right}}, {1.7}, 0.0, 0.0);
  const TwoLayerConfig c{{mu[0], lam[0]}, {mu[1], lam[1]}};
  CHECK(log_weight(c, g) == doctest::Approx(psi_factor(1.7, lam, mu)));
}

TEST_CASE("skew Whittaker") {
  Philox rng(Seed(3));
  const MatPair lam{random_spd(2, rng), random_spd(2, rng)}, mu{random_spd(2, rng), random_spd(2, rng)};
  const IntegralEstimate one = skew_whittaker({1.4}, lam, mu, 10, Seed(4));
  CHECK(one.value == doctest::Approx(std::exp(psi_factor(1.4, lam, mu))));
  CHECK(one.std_error == 0.0);

  const MatPair ones{sc(1), sc(1)};
  const IntegralEstimate a = skew_whittaker({1.0, 2.0}, ones, ones, 100000, Seed(5));
  const IntegralEstimate b = skew_whittaker({2.0, 1.0}, ones, ones, 100000, Seed(6));
  CHECK(std::abs(a.value - b.value) < 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("bulk kernel at d = 1") {
  const KernelParams p{1.2, 1.8, 0.0, 0.0};
  const MatPair ones{sc(1), sc(1)};
  std::vector<double> l1, l2, ref;
  for (int r = 0; r < 20000; ++r) {
    const MatPair out = kernel_bulk_sample(p, ones, ones, Seed(7, {static_cast<std::uint64_t>(r)}));
    l1.push_back(std::log(out[0](0, 0)));
    l2.push_back(std::log(out[1](0, 0)));
    ref.push_back(std::log(2.0 / Philox(Seed(8, {static_cast<std::uint64_t>(r)})).gamma(3.0)));
  }
  CHECK(ks_two_sample(l1, ref).p_value > 0.01);
  CHECK(std::abs(mean(l2) - scalar_gig_log_mean(-3.0, 2.0, 2.0)) < 4.0 * std_error(l2));
  CHECK(std::abs(correlation(l1, l2)) < 4.0 / std::sqrt(20000.0));
}

TEST_CASE("left kernel at d = 1") {
  const MatPair ones{sc(1), sc(1)};
  std::vector<double> l1, l2, ref;
  for (int r = 0; r < 20000; ++r) {
    const MatPair out = kernel_left_sample({2.0, 0.0, 1.0, 0.0}, ones, Seed(9, {static_cast<std::uint64_t>(r)}));
    l1.push_back(std::log(out[0](0, 0)));
    ref.push_back(-std::log(Philox(Seed(10, {static_cast<std::uint64_t>(r)})).gamma(3.0)));
    const MatPair eq = kernel_left_sample({2.0, 0.0, 2.0, 0.0}, ones, Seed(11, {static_cast<std::uint64_t>(r)}));
    l2.push_back(std::log(eq[1](0, 0)));
  }
  CHECK(ks_two_sample(l1, ref).p_value > 0.01);
  CHECK(std::abs(mean(l2) - scalar_gig_log_mean(0.0, 1.0, 1.0)) < 4.0 * std_error(l2));
}

TEST_CASE("kernels are translation covariant in law") {
  Philox rng(Seed(12));
  const MatPair lam{random_spd(2, rng), random_spd(2, rng)};
  const Mat x = random_spd(2, rng);
  const KernelParams p{2.0, 0.0, 0.7, 0.0};
  const MatPair moved{star(lam[0], x), star(lam[1], x)};
  std::vector<Mat> a1, b1, a2, b2;
  for (int r = 0; r < 10000; ++r) {
    const MatPair s = kernel_left_sample(p, moved, Seed(13, {static_cast<std::uint64_t>(r)}));
    const MatPair t = kernel_left_sample(p, lam, Seed(14, {static_cast<std::uint64_t>(r)}));
    a1.push_back(s[0]);
    a2.push_back(s[1]);
    b1.push_back(star(t[0], x));
    b2.push_back(star(t[1], x));
  }
  CHECK(ks_two_sample(logdets(a1), logdets(b1)).p_value > 0.01);
  CHECK(ks_two_sample(logdets(a2), logdets(b2)).p_value > 0.01);
}

TEST_CASE("push-block update") {
  StripParams sp;
  sp.d = 1;
  sp.thetas = {1.5, 2.0};
  sp.u = 0.5;
  sp.v = 0.6;
  sp.regime = StripRegime::MaximalCurrent;
  const DownRightPath path{{0, 0}, {Step::Down, Step::Right}};
  TwoLayerConfig c{{sc(1), sc(2), sc(3)}, {sc(1.5), sc(2.5), sc(3.5)}};
  const TwoLayerConfig same = push_block_update(sp, path, c, path, Seed(15));
  CHECK(same.lambda1 == c.lambda1);
  CHECK(same.lambda2 == c.lambda2);

  // A single bulk raise touches only vertex 1.
  const DownRightPath raised{{0, 0}, {Step::Right, Step::Down}};
  const TwoLayerConfig one = push_block_update(sp, path, c, raised, Seed(16));
  CHECK(one.lambda1[0] == c.lambda1[0]);
  CHECK(one.lambda1[2] == c.lambda1[2]);
  CHECK(one.lambda1[1] != c.lambda1[1]);
}

TEST_CASE("normalization constant for N = 1") {
  CHECK(normalization_n1_log(2, 1.5, 0.8, 0.9) ==
        doctest::Approx(multigamma_ln(2, 1.7) + multigamma_ln(2, 2.4) + multigamma_ln(2, 2.3)));
}

TEST_CASE("site conditional matches the weight in the site variable") {
  Philox rng(Seed(17));
  const DownRightPath path{{0, 0}, {Step::Right, Step::Down}};
  const TwoLayerGraph g = TwoLayerGraph::build(path, {1.5, 2.2}, 0.4, 0.6);
  TwoLayerConfig c;
  for (int k = 0; k < 3; ++k) {
    c.lambda1.push_back(random_spd(2, rng));
    c.lambda2.push_back(random_spd(2, rng));
  }
  for (const VertexRef site : {VertexRef{0, 1}, VertexRef{1, 0}, VertexRef{1, 2}}) {
    const GigParams gp = site_conditional(g, c, site);
    TwoLayerConfig a = c, b = c;
    a.at(site) = random_spd(2, rng);
    b.at(site) = random_spd(2, rng);
    const double lhs = log_weight(a, g) - log_weight(b, g);
    const double rhs = gp.log_unnormalized(a.at(site)) - gp.log_unnormalized(b.at(site));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("one-layer kernels") {
  const KernelParams p{1.2, 1.8, 0.0, 0.0};
  const Mat lam = identity(2), mu = identity(2) * 2.0;
  const Seed s(18);
  const Mat bulk = one_layer_kernel(OneLayerKind::Bulk, p, lam, &mu, s);
  CHECK(is_spd(bulk));
  CHECK_THROWS_AS(one_layer_kernel(OneLayerKind::Bulk, p, lam, nullptr, s), ParameterError);
}
