#include "ivpoly/matfun.hpp"

#include "ivpoly/parallel.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ivp {

namespace {

constexpr long kBlock = 1024;

void require_domain(int d, double theta, const char* what) {
  if (d < 1) throw ParameterError(std::string(what) + ": dimension must be positive");
  if (!(theta > 0.5 * (d - 1))) {
    std::ostringstream os;
    os << what << ": theta = " << theta << " must exceed (d-1)/2 = " << 0.5 * (d - 1);
    throw ParameterError(os.str());
  }
}

// Integral over the real line of exp(h(t)) with h concave-ish and peaked near t0.
template <class H>
double integrate_log_scale(H h, double t0) {
  const double h0 = h(t0);
  boost::math::quadrature::sinh_sinh<double> integrator;
  auto g = [&](double s) {
    const double v = h(t0 + s) - h0;
    return v < -745.0 ? 0.0 : std::exp(v);
  };
  const double r = integrator.integrate(g, 1e-13);
  return std::exp(h0) * r;
}

double gig_mode_log(double a, double p, double q) {
  if (p <= 0.0) return std::log(q / std::max(-a, 1e-12));
  return std::log((a + std::sqrt(a * a + 4.0 * p * q)) / (2.0 * p));
}

}  // namespace

double digamma(double x) {
  if (!(x > 0.0)) throw ParameterError("digamma: argument must be positive");
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / x, r2 = r * r;
  const double series =
      r2 * (1.0 / 12 - r2 * (1.0 / 120 - r2 * (1.0 / 252 - r2 * (1.0 / 240 - r2 * (1.0 / 132 - r2 * (691.0 / 32760 - r2 / 12))))));
  return acc + std::log(x) - 0.5 * r - series;
}

double multigamma_ln(int d, double theta) {
  require_domain(d, theta, "multigamma_ln");
  double s = 0.25 * d * (d - 1) * std::log(M_PI);
  for (int k = 1; k <= d; ++k) s += std::lgamma(theta - 0.5 * (k - 1));
  return s;
}

double multidigamma(int d, double theta) {
  require_domain(d, theta, "multidigamma");
  double s = 0.0;
  for (int k = 1; k <= d; ++k) s += digamma(theta - 0.5 * (k - 1));
  return s;
}

double inv_wishart_mean_constant(int d, double gamma) {
  if (!(gamma > 0.5 * (d + 1))) throw ParameterError("inv_wishart_mean_constant: gamma <= (d+1)/2");
  return 1.0 / (gamma - 0.5 * (d + 1));
}

IntegralEstimate estimate_from_log_weights(const std::vector<double>& lw) {
  IntegralEstimate est;
  est.n_samples = static_cast<long>(lw.size());
  if (lw.empty()) return est;
  double m = -std::numeric_limits<double>::infinity();
  for (double v : lw) m = std::max(m, v);
  if (!std::isfinite(m)) return est;
  const double n = static_cast<double>(lw.size());
  double mean = 0.0;
  for (double v : lw) mean += std::exp(v - m);
  mean /= n;
  double ss = 0.0;
  for (double v : lw) {
    const double e = std::exp(v - m) - mean;
    ss += e * e;
  }
  const double var = lw.size() > 1 ? ss / (n - 1.0) : 0.0;
  est.value = std::exp(m) * mean;
  est.std_error = std::exp(m) * std::sqrt(var / n);
  return est;
}

IntegralEstimate integrate_pd_product(const LogIntegrandN& log_f,
                                      const std::vector<ProposalSpec>& proposals, long n,
                                      const Seed& seed) {
  if (n < 1) throw ParameterError("integrate_pd: n must be positive");
  std::vector<double> lw(static_cast<std::size_t>(n));
  const long blocks = (n + kBlock - 1) / kBlock;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    Philox rng(seed.child(b));
    std::vector<Mat> xs(proposals.size());
    const long lo = static_cast<long>(b) * kBlock, hi = std::min(n, lo + kBlock);
    for (long i = lo; i < hi; ++i) {
      double lq = 0.0;
      for (std::size_t j = 0; j < proposals.size(); ++j) {
        xs[j] = proposals[j].sample(rng);
        lq += proposals[j].log_density(xs[j]);
      }
      const double v = log_f(xs) - lq;
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        std::ostringstream os;
        os << "integrate_pd: nonfinite weight at sample " << i;
        for (const auto& x : xs) os << "\n" << x;
        throw NumericalError(os.str());
      }
      lw[static_cast<std::size_t>(i)] = v;
    }
  });
  return estimate_from_log_weights(lw);
}

IntegralEstimate integrate_pd(const LogIntegrand& log_f, const ProposalSpec& proposal, long n,
                              const Seed& seed) {
  return integrate_pd_product([&](const std::vector<Mat>& xs) { return log_f(xs[0]); }, {proposal},
                              n, seed);
}

double gig_log_integral_exact(const GigParams& g) {
  const int d = g.dim();
  if (g.p_zero) return multigamma_ln(d, -g.a) + g.a * logdet(g.Q);
  if (g.q_zero) return multigamma_ln(d, g.a) - g.a * logdet(g.P);
  throw ParameterError("gig_log_integral_exact: needs P = 0 or Q = 0");
}

IntegralEstimate gig_integral(const GigParams& g, long n, const Seed& seed) {
  if (g.p_zero || g.q_zero) return {std::exp(gig_log_integral_exact(g)), 0.0, n};
  auto lf = [&](const Mat& x) { return g.log_unnormalized(x); };
  const ProposalSpec candidates[2] = {g.matched_proposal(ProposalSpec::Kind::InverseWishart),
                                      g.matched_proposal(ProposalSpec::Kind::Wishart)};
  const long pilot = std::min<long>(2000, std::max<long>(200, n / 10));
  int best = 0;
  double best_cv = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    IntegralEstimate e = integrate_pd(lf, candidates[k], pilot, seed.child(1, k));
    const double cv = e.value > 0 ? e.std_error / e.value : std::numeric_limits<double>::infinity();
    if (cv < best_cv) {
      best_cv = cv;
      best = k;
    }
  }
  return integrate_pd(lf, candidates[best], n, seed.child(0));
}

IntegralEstimate kbessel(double nu, const Mat& V, const Mat& W, long n, const Seed& seed) {
  require_spd(V, "kbessel V");
  require_spd(W, "kbessel W");
  require_same_dim(V, W, "kbessel");
  return gig_integral(GigParams(nu, V, W), n, seed);
}

IntegralEstimate whittaker2(double alpha, double beta, const Mat& X1, const Mat& X2, long n,
                            const Seed& seed) {
  require_spd(X1, "whittaker2 X1");
  require_spd(X2, "whittaker2 X2");
  require_same_dim(X1, X2, "whittaker2");
  IntegralEstimate e = gig_integral(GigParams(beta - alpha, spd_inverse(X1), X2), n, seed);
  const double pre = std::exp(-beta * (logdet(X1) + logdet(X2)));
  return {e.value * pre, e.std_error * pre, e.n_samples};
}

double gig_integral_quad(double a, double p, double q) {
  auto h = [=](double t) { return a * t - p * std::exp(t) - q * std::exp(-t); };
  return integrate_log_scale(h, gig_mode_log(a, p, q));
}

double gig_log_moment_quad(double a, double p, double q) {
  const double t0 = gig_mode_log(a, p, q);
  auto h = [=](double t) { return a * t - p * std::exp(t) - q * std::exp(-t); };
  const double z = integrate_log_scale(h, t0);
  boost::math::quadrature::sinh_sinh<double> integrator;
  const double h0 = h(t0);
  auto g = [&](double s) {
    const double v = h(t0 + s) - h0;
    return v < -745.0 ? 0.0 : s * std::exp(v);
  };
  return t0 + std::exp(h0) * integrator.integrate(g, 1e-13) / z;
}

double gig_mean_quad(double a, double p, double q) {
  return gig_integral_quad(a + 1.0, p, q) / gig_integral_quad(a, p, q);
}

double kbessel_quad(double nu, double v, double w) { return gig_integral_quad(nu, v, w); }

double whittaker2_quad(double alpha, double beta, double x1, double x2) {
  return std::pow(x1 * x2, -beta) * gig_integral_quad(beta - alpha, 1.0 / x1, x2);
}

}  // namespace ivp
