#include "ivpoly/tproposal.hpp"

#include <Eigen/Cholesky>

#include "ivpoly/parallel.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ivp {

namespace {

constexpr long kBlock = 1024;

int tri(int d) { return d * (d + 1) / 2; }

}  // namespace

TProposal TProposal::fit(const std::vector<std::vector<Mat>>& samples, double nu, double inflate) {
  if (samples.size() < 2) throw ParameterError("TProposal::fit: need at least two samples");
  TProposal t;
  t.k_ = static_cast<int>(samples.front().size());
  t.d_ = static_cast<int>(samples.front().front().rows());
  t.nu_ = nu;
  const int D = t.k_ * tri(t.d_);
  std::vector<Vec> zs;
  zs.reserve(samples.size());
  for (const auto& s : samples) {
    Vec z(D);
    for (int j = 0; j < t.k_; ++j) z.segment(j * tri(t.d_), tri(t.d_)) = log_cholesky_coords(s[j]);
    zs.push_back(std::move(z));
  }
  t.mean_ = Vec::Zero(D);
  for (const Vec& z : zs) t.mean_ += z;
  t.mean_ /= static_cast<double>(zs.size());
  Mat cov = Mat::Zero(D, D);
  for (const Vec& z : zs) cov += (z - t.mean_) * (z - t.mean_).transpose();
  cov /= static_cast<double>(zs.size() - 1);
  cov *= inflate;
  cov += 1e-10 * Mat::Identity(D, D);
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("TProposal::fit: covariance not positive definite");
  t.chol_ = llt.matrixL();
  const double half_logdet = t.chol_.diagonal().array().log().sum();
  t.log_norm_ = std::lgamma(0.5 * (nu + D)) - std::lgamma(0.5 * nu) - 0.5 * D * std::log(nu * M_PI) - half_logdet;
  return t;
}

double TProposal::log_density_z(const Vec& z) const {
  const int D = static_cast<int>(mean_.size());
  const Vec r = chol_.triangularView<Eigen::Lower>().solve(z - mean_);
  double lq = log_norm_ - 0.5 * (nu_ + D) * std::log1p(r.squaredNorm() / nu_);
  // Density against Π dμ: divide by the Jacobian dμ/dz.
  for (int j = 0; j < k_; ++j) lq -= log_cholesky_log_jacobian(z.segment(j * tri(d_), tri(d_)), d_);
  return lq;
}

std::vector<Mat> TProposal::unpack(const Vec& z) const {
  std::vector<Mat> xs;
  for (int j = 0; j < k_; ++j) xs.push_back(from_log_cholesky(z.segment(j * tri(d_), tri(d_)), d_));
  return xs;
}

std::vector<Mat> TProposal::sample(Philox& rng, double& log_density) const {
  const int D = static_cast<int>(mean_.size());
  Vec g(D);
  for (int i = 0; i < D; ++i) g(i) = rng.normal();
  std::chi_squared_distribution<double> chi(nu_);
  const double w = std::sqrt(nu_ / chi(rng));
  const Vec z = mean_ + w * (chol_ * g);
  log_density = log_density_z(z);
  return unpack(z);
}

double TProposal::log_density(const std::vector<Mat>& xs) const {
  Vec z(mean_.size());
  for (int j = 0; j < k_; ++j) z.segment(j * tri(d_), tri(d_)) = log_cholesky_coords(xs[j]);
  return log_density_z(z);
}

IntegralEstimate integrate_t(const LogIntegrandN& log_f, const TProposal& proposal, long n,
                             const Seed& seed) {
  if (n < 1) throw ParameterError("integrate_t: n must be positive");
  std::vector<double> lw(static_cast<std::size_t>(n));
  const long blocks = (n + kBlock - 1) / kBlock;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    Philox rng(seed.child(b));
    const long lo = static_cast<long>(b) * kBlock, hi = std::min(n, lo + kBlock);
    for (long i = lo; i < hi; ++i) {
      double lq = 0.0;
      const auto xs = proposal.sample(rng, lq);
      bool finite = std::isfinite(lq);
      for (const Mat& x : xs) finite = finite && x.allFinite() && x.llt().info() == Eigen::Success;
      if (!finite) {
        // Overflow or loss of definiteness far in the proposal tail, where the
        // target mass is nil.
        lw[static_cast<std::size_t>(i)] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const double v = log_f(xs) - lq;
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        std::ostringstream os;
        os << "integrate_t: nonfinite weight at sample " << i;
        throw NumericalError(os.str());
      }
      lw[static_cast<std::size_t>(i)] = v;
    }
  });
  return estimate_from_log_weights(lw);
}

}  // namespace ivp
