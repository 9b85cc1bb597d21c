#pragma once

#include "ivpoly/rng.hpp"
#include "ivpoly/spd.hpp"

#include <optional>
#include <vector>

namespace ivp {

enum class Step { Right, Down };

// Laws of the form Wis(shape) ⋆ scale or Wis⁻¹(shape) ⋆ scale, used both as
// importance proposals and as exact samplers.
struct ProposalSpec {
  enum class Kind { Wishart, InverseWishart };

  ProposalSpec(Kind kind, double shape, const Mat& scale);

  Kind kind;
  double shape;
  Mat scale;

  Mat sample(Philox& rng) const;
  // log density against dμ.
  double log_density(const Mat& x) const;

 private:
  Mat scale_half_;
  Mat scale_inv_;
  double scale_logdet_ = 0.0;
  double log_norm_ = 0.0;
};

// Paper parametrization: density |x|^θ e^{-tr x} / Γ_d(θ) against dμ.
Mat sample_wishart(int d, double theta, Philox& rng);
Mat sample_wishart(int d, double theta, const Seed& seed);
Mat sample_inv_wishart(int d, double theta, Philox& rng);
Mat sample_inv_wishart(int d, double theta, const Seed& seed);

double log_wishart_density(const Mat& x, double theta);
double log_inv_wishart_density(const Mat& x, double theta);

void require_shape(int d, double theta, const char* what);

// Density ∝ |x|^a e^{-tr[P x + Q x^{-1}]} against dμ.
struct GigParams {
  GigParams(double a, const Mat& P, const Mat& Q);

  double a;
  Mat P;
  Mat Q;
  bool p_zero;
  bool q_zero;

  int dim() const { return static_cast<int>(P.rows()); }
  double log_unnormalized(const Mat& x) const;
  // Independence proposal whose density ratio to the target is bounded.
  // kind selects which tail the proposal copies exactly.
  ProposalSpec matched_proposal(ProposalSpec::Kind kind) const;
  ProposalSpec default_proposal() const;
};

// One block of a Metropolis–Hastings chain for the matrix GIG law.  Exact
// draws when P = 0 or Q = 0.  Otherwise each of the mh_steps rounds is an
// independence step followed by a random-walk step on log-Cholesky
// coordinates; both preserve the target.
Mat sample_matrix_gig(const GigParams& params, const Mat& current, int mh_steps, Philox& rng);
Mat sample_matrix_gig(const GigParams& params, const Mat& current, int mh_steps, const Seed& seed);

struct WalkSpec {
  std::vector<double> gammas;
  std::vector<Step> word;
  Mat start;
};

// S_k = X_k ⋆ S_{k-1} with X_k ~ Wis⁻¹(γ_k) on RIGHT steps, Wis(γ_k) on DOWN steps.
std::vector<Mat> sample_walk(const WalkSpec& spec, const Seed& seed);

// Values indexed by an integer range [kmin, kmax].
struct IndexedFamily {
  long kmin = 0;
  std::vector<Mat> values;

  long kmax() const { return kmin + static_cast<long>(values.size()) - 1; }
  const Mat& at(long k) const;
  Mat& at(long k);
};

IndexedFamily sample_two_sided_walk(double alpha, double beta, const Mat& S0, int m, int n,
                                    const Seed& seed);

struct BoundarySpec {
  int d = 1;
  double theta = 1.0;
  double u = 0.0;
  int M = 0;
  std::optional<Mat> reference;  // empty means identity

  void validate() const;
};

// Family B_{-m_max..n_max}; B_k sits at (k,0) for k > 0 and at (0,-k) for k <= 0.
IndexedFamily sample_stationary_boundary(const BoundarySpec& spec, int m_max, int n_max,
                                         const Seed& seed);

// Delta boundary: B_1 = id, every other value 0.
IndexedFamily delta_boundary(int d, int m_max, int n_max);

}  // namespace ivp
