#pragma once

#include "ivpoly/gibbs.hpp"
#include "ivpoly/polymer.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ivp {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::optional<double> p_value;
  bool passed = false;
  long n_samples = 0;
  Seed seed;
  std::string notes;

  bool operator==(const TestReport& o) const;
};

bool all_passed(const std::vector<TestReport>& reports);

// Scalar views of a matrix law: log-det, trace, trace of the inverse and the
// largest eigenvalue.
std::array<double, 4> functionals(const Mat& x);
extern const std::array<const char*, 4> kFunctionalNames;

// Two-sample KS; passes iff p >= level.
TestReport two_sample_test(const std::vector<double>& xs, const std::vector<double>& ys,
                           double level, const std::string& name = "two_sample");

// Agreement of two estimates within k combined standard errors.
TestReport compare_estimates(const std::string& name, double a, double se_a, double b, double se_b,
                             double k, long n, const Seed& seed);

// Random SPD matrix with eigenvalues in [lo, hi] (test input generator).
Mat random_spd(int d, Philox& rng, double lo = 0.3, double hi = 3.0);

// Null and alternative KS runs confirming size and power of the harness.
std::vector<TestReport> calibration_reports(const Seed& seed, long n = 10000);

// (U', V') from the one-step update versus fresh (U, V), with S a fixed
// reference.
TestReport one_step_identity(int d, double theta, double u, long replicates, const Seed& seed,
                             double level = 0.01);

struct QuadrantStationarityConfig {
  int d = 1;
  double theta = 2.0;
  double u = 0.0;
  int M = 2;
  std::optional<Mat> S;  // reference at (0, M); identity when empty
  std::vector<DownRightPath> paths;
  long replicates = 10000;
  double level = 0.01;
};

// Increments along down-right paths from (0,M) against direct Wis± draws,
// Bonferroni-corrected over steps, functionals and consecutive pairs.
TestReport stationarity_quadrant(const QuadrantStationarityConfig& cfg, const Seed& seed);

// E[log|Z(n,m)| - log|Z(0,0)|] = -n ψ_d(θ-u) - m ψ_d(θ+u), m <= M.
TestReport expectation_identity(int d, double theta, double u, int M, int n, int m, long replicates,
                                const Seed& seed);

struct StripStationarityConfig {
  StripParams params;            // equilibrium regime
  std::vector<Step> bottom_word;  // path from (0,0)
  std::optional<Mat> S;
  long replicates = 10000;
  double level = 0.01;
};

// Raises the bottom path (never its start) up to the horizontal path and
// tests the increments along every intermediate path.
TestReport stationarity_strip_equilibrium(const StripStationarityConfig& cfg, const Seed& seed);

// E[M(k)] = id entrywise within 4 SE and the pathwise Minkowski chain.
TestReport martingale_check(int d, double theta, int k_max, long replicates, const Seed& seed);

struct FreeEnergyEstimate {
  long n = 0;
  double mean_logdet_over_n = 0.0;
  double std_error = 0.0;
  long replicates = 0;
  std::vector<double> samples;
};

enum class FreeEnergyModel { QuadrantDelta, Strip };

struct FreeEnergyResult {
  FreeEnergyEstimate estimate;
  double target = 0.0;
  TestReport report;
};

FreeEnergyResult free_energy(FreeEnergyModel model, const QuadrantParams* qp, const StripParams* sp,
                             long n, long replicates, const Seed& seed, double bias_budget = 0.05);

// Two-layer (d = 1, N = 1) chain moments against a three-dimensional
// quadrature of the pinned density.
TestReport mcmc_quadrature_check(double theta, double u, double v, long sweeps, const Seed& seed);

// First layer of a push-block translation against one strip_evolve step.
TestReport push_block_marginal_check(const StripParams& params, const std::vector<Step>& word,
                                     long replicates, const Seed& seed);

struct IdentitySuiteOptions {
  int d = 1;
  long samples = 200000;
  long algebraic_cases = 1000;
  bool include_normalization = true;
};

// Two-layer and one-layer Cauchy/Littlewood identities, skew-Whittaker
// symmetry and the normalization constants.
std::vector<TestReport> identity_suite(const IdentitySuiteOptions& opts, const Seed& seed);

// Γ_d and ψ_d, the Laplace integral, Bessel/Whittaker parameter symmetry and,
// at d = 1, Monte Carlo against quadrature.
std::vector<TestReport> special_function_checks(int d, long samples, const Seed& seed);

// Deterministic identities over random inputs: change of variable, ⋆
// determinant, Minkowski, SPD square root, translation invariance.
std::vector<TestReport> algebraic_checks(int d, long cases, const Seed& seed, double tol = 1e-9);

}  // namespace ivp
