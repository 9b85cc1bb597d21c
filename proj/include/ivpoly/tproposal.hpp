#pragma once

#include "ivpoly/matfun.hpp"

#include <vector>

namespace ivp {

// Multivariate Student-t law on the stacked log-Cholesky coordinates of k
// SPD matrices of size d.  Densities are reported against the product of dμ.
class TProposal {
 public:
  // Fits location and scale to the samples and inflates the covariance.
  static TProposal fit(const std::vector<std::vector<Mat>>& samples, double nu = 5.0,
                       double inflate = 1.5);

  int dim() const { return d_; }
  int count() const { return k_; }

  std::vector<Mat> sample(Philox& rng, double& log_density) const;
  double log_density(const std::vector<Mat>& xs) const;

 private:
  double log_density_z(const Vec& z) const;
  std::vector<Mat> unpack(const Vec& z) const;

  int d_ = 1;
  int k_ = 1;
  double nu_ = 5.0;
  Vec mean_;
  Mat chol_;
  double log_norm_ = 0.0;
};

IntegralEstimate integrate_t(const LogIntegrandN& log_f, const TProposal& proposal, long n,
                             const Seed& seed);

}  // namespace ivp
