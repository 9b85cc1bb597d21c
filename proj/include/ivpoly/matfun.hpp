#pragma once

#include "ivpoly/sampling.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace ivp {

struct IntegralEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;

  double rel_error() const { return value != 0.0 ? std_error / std::abs(value) : 0.0; }
};

// Scalar digamma; accurate to about 1e-13 for x > 0.
double digamma(double x);

// log Γ_d(θ) = d(d-1)/4 log π + Σ_{k=1}^d log Γ(θ - (k-1)/2).
double multigamma_ln(int d, double theta);
// ψ_d(θ) = d/dθ log Γ_d(θ).
double multidigamma(int d, double theta);
// c(γ) with E[Wis⁻¹(γ)] = c(γ) id, defined for γ > (d+1)/2.
double inv_wishart_mean_constant(int d, double gamma);

using LogIntegrand = std::function<double(const Mat&)>;
using LogIntegrandN = std::function<double(const std::vector<Mat>&)>;

// Importance-sampling estimate of ∫ f dμ where log_f returns log f.
IntegralEstimate integrate_pd(const LogIntegrand& log_f, const ProposalSpec& proposal, long n,
                              const Seed& seed);
// Same for an integral over several independent SPD variables, each with its own proposal.
IntegralEstimate integrate_pd_product(const LogIntegrandN& log_f,
                                      const std::vector<ProposalSpec>& proposals, long n,
                                      const Seed& seed);
// Mean and CLT standard error of exp(lw), computed with a common shift.
IntegralEstimate estimate_from_log_weights(const std::vector<double>& log_weights);

// ∫ |x|^a e^{-tr[Px + Qx^{-1}]} dμ(x).  Exact when P or Q vanishes; otherwise
// importance sampling with the better of two bounded-ratio proposals, picked
// by a pilot run on a separate stream.
IntegralEstimate gig_integral(const GigParams& params, long n, const Seed& seed);
double gig_log_integral_exact(const GigParams& params);  // requires P = 0 or Q = 0

// K_ν(V,W) = ∫ |Y|^ν e^{-tr[VY + WY^{-1}]} dμ(Y).
IntegralEstimate kbessel(double nu, const Mat& V, const Mat& W, long n, const Seed& seed);

// ψ_{(α,β)}(X1,X2) = |X1 X2|^{-β} ∫ |Y|^{β-α} e^{-tr[X1^{-1}Y + X2 Y^{-1}]} dμ(Y).
IntegralEstimate whittaker2(double alpha, double beta, const Mat& X1, const Mat& X2, long n,
                            const Seed& seed);

// Scalar (d = 1) evaluations by adaptive quadrature on the log scale.
double gig_integral_quad(double a, double p, double q);
// E[log x] and E[x] under the normalized scalar GIG law.
double gig_log_moment_quad(double a, double p, double q);
double gig_mean_quad(double a, double p, double q);
double kbessel_quad(double nu, double v, double w);
double whittaker2_quad(double alpha, double beta, double x1, double x2);

}  // namespace ivp
