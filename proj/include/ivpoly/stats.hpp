#pragma once

#include <cstddef>
#include <vector>

namespace ivp {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys);

// Kolmogorov limiting survival function Q(λ) = 2 Σ (-1)^{k-1} e^{-2k²λ²}.
double kolmogorov_q(double lambda);

double mean(const std::vector<double>& xs);
double std_error(const std::vector<double>& xs);
// Standard error of the mean from `batches` contiguous batch means.
double batch_means_se(const std::vector<double>& xs, int batches = 20);
// Split-chain potential scale reduction factor.
double split_rhat(const std::vector<std::vector<double>>& chains);
double correlation(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace ivp
