#pragma once

#include "ivpoly/matfun.hpp"
#include "ivpoly/polymer.hpp"

#include <array>
#include <vector>

namespace ivp {

using MatPair = std::array<Mat, 2>;  // (first layer, second layer)

struct VertexRef {
  int layer = 0;  // 0 for λ₁, 1 for λ₂
  int index = 0;  // path position 0..N

  bool operator==(const VertexRef& o) const { return layer == o.layer && index == o.index; }
};

// Every edge weight has the form |y x⁻¹|^c e^{-t·tr[y x⁻¹]}:
//   solid  c = γ, t = 1  (x is the later vertex on RIGHT steps, the earlier on DOWN steps)
//   dotted c = 0, t = 1
//   arc    c = u or v, t = 0, with x = λ₁ and y = λ₂ at the same position
struct Edge {
  enum class Kind { Solid, Dotted, Arc };
  Kind kind;
  VertexRef x;
  VertexRef y;
  double c;
  bool trace;
};

struct TwoLayerGraph {
  DownRightPath path;
  std::vector<double> gammas;
  double u = 0.0;
  double v = 0.0;
  std::vector<Edge> edges;

  static TwoLayerGraph build(const DownRightPath& path, const std::vector<double>& gammas,
                             double u, double v);
  // Labels read from the strip's maximal-current rule.
  static TwoLayerGraph for_strip(const DownRightPath& path, const StripParams& params);
  std::size_t length() const { return gammas.size(); }
};

struct TwoLayerConfig {
  std::vector<Mat> lambda1;
  std::vector<Mat> lambda2;

  static TwoLayerConfig constant(std::size_t n_plus_1, const Mat& value);
  std::size_t size() const { return lambda1.size(); }
  const Mat& at(const VertexRef& r) const { return r.layer == 0 ? lambda1.at(r.index) : lambda2.at(r.index); }
  Mat& at(const VertexRef& r) { return r.layer == 0 ? lambda1.at(r.index) : lambda2.at(r.index); }
  MatPair pair(std::size_t i) const { return {lambda1.at(i), lambda2.at(i)}; }
  // Every value replaced by value ⋆ x.
  TwoLayerConfig star_all(const Mat& x) const;
};

double edge_log_weight(const Mat& x, const Mat& y, double c, bool trace);
double log_weight(const TwoLayerConfig& config, const TwoLayerGraph& graph);
// One-layer path: a single solid edge per step.
double log_weight_one_layer(const std::vector<Mat>& values, const DownRightPath& path,
                            const std::vector<double>& gammas);

// log Ψ_γ(λ/μ) = γ log|μ₁λ₁⁻¹| + γ log|μ₂λ₂⁻¹| - tr[μ₁λ₁⁻¹ + μ₂λ₂⁻¹ + λ₂μ₁⁻¹].
double psi_factor(double gamma, const MatPair& lambda, const MatPair& mu);

// Conditional law of one site given all others: |x|^a e^{-tr[Px + Qx⁻¹]}.
GigParams site_conditional(const TwoLayerGraph& graph, const TwoLayerConfig& config, const VertexRef& site);

// Ψ_{γ_1..γ_n}(λ/μ) = ∫ Π_i Ψ_{γ_i}(κ^i/κ^{i-1}) Π dμ(κ^i), κ^0 = μ, κ^n = λ.
// Length 1 is exact, length 2 factorizes into two matrix-GIG integrals, longer
// chains use sequential importance sampling.
IntegralEstimate skew_whittaker(const std::vector<double>& gammas, const MatPair& lambda,
                                const MatPair& mu, long n, const Seed& seed);

struct KernelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double u = 0.0;
  double v = 0.0;
};

// Local push-block kernels.  The first layer is drawn exactly; the second
// layer runs `mh_steps` rounds of the matrix-GIG chain from `start2` (or
// from the first-layer draw when start2 is empty).
MatPair kernel_bulk_sample(const KernelParams& p, const MatPair& lambda, const MatPair& mu,
                           const Seed& seed, int mh_steps = 20, const Mat* start2 = nullptr);
MatPair kernel_left_sample(const KernelParams& p, const MatPair& lambda, const Seed& seed,
                           int mh_steps = 20, const Mat* start2 = nullptr);
MatPair kernel_right_sample(const KernelParams& p, const MatPair& lambda, const Seed& seed,
                            int mh_steps = 20, const Mat* start2 = nullptr);

// Moves `path` to `target` by leftmost-first raises, each drawn from the local
// kernel with labels of the raised graph.  Vertex seeds follow the lattice
// coordinates of the new vertex, as in the polymer recurrence.
TwoLayerConfig push_block_update(const StripParams& params, const DownRightPath& path,
                                 const TwoLayerConfig& config, const DownRightPath& target,
                                 const Seed& seed, int mh_steps = 20);

struct McmcOptions {
  int sweeps = 2000;
  int burn_in = 500;
  int thin = 1;
  int chains = 2;
  int mh_steps = 1;
  double rhat_threshold = 1.1;
};

struct McmcResult {
  std::vector<TwoLayerConfig> samples;  // all chains, chain-major
  std::vector<std::vector<double>> monitor;  // log|λ₂^N| per chain
  double rhat = 1.0;
  bool converged = true;
};

// Systematic-scan Metropolis-within-Gibbs for the pinned two-layer measure.
McmcResult mcmc_two_layer(const StripParams& params, const DownRightPath& path, const Mat& pin,
                          const McmcOptions& opts, const Seed& seed);

// Importance-sampling estimate of the two-layer normalization with λ₁⁰ = pin.
// The proposal is a multivariate t fitted to an MCMC pilot.
IntegralEstimate normalization_estimate(const StripParams& params, const DownRightPath& path,
                                        long n, const Seed& seed, const Mat* pin = nullptr);

// Γ_d(u+v) Γ_d(ϑ_1+v) Γ_d(ϑ_1+u), the N = 1 value, on the log scale.
double normalization_n1_log(int d, double theta, double u, double v);

enum class OneLayerKind { Bulk, Left, Right };

// Bulk: W ⋆ (λ + μ), W ~ Wis⁻¹(α+β).  Left/right: W ⋆ λ, W ~ Wis⁻¹(γ) with γ
// the label of the new edge (passed in alpha).
Mat one_layer_kernel(OneLayerKind kind, const KernelParams& p, const Mat& lambda, const Mat* mu,
                     const Seed& seed);

// Importance-sampling estimate of ∫ wt^P dμ over λ^1..λ^N with λ^0 fixed.
IntegralEstimate one_layer_normalization(const DownRightPath& path, const std::vector<double>& gammas,
                                         const Mat& lambda0, long n, const Seed& seed);

}  // namespace ivp
