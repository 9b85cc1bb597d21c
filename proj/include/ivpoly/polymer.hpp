#pragma once

#include "ivpoly/sampling.hpp"

#include <string>
#include <vector>

namespace ivp {

struct Point {
  long n = 0;  // column
  long m = 0;  // row

  bool operator==(const Point& o) const { return n == o.n && m == o.m; }
  bool operator!=(const Point& o) const { return !(*this == o); }
};

// Steps are (1,0) for RIGHT and (0,-1) for DOWN.
struct DownRightPath {
  Point start;
  std::vector<Step> word;

  std::size_t length() const { return word.size(); }
  std::vector<Point> vertices() const;

  static DownRightPath from_vertices(const std::vector<Point>& pts);
  // Parses "RRDD" / "R,D" style words.
  static std::vector<Step> parse_word(const std::string& s);
  static std::string word_string(const std::vector<Step>& w);
};

// Inhomogeneous quadrant: W(n,m) ~ Wis⁻¹(α_n + β_m).  The homogeneous model
// uses α_n = θ - u and β_m = θ + u for every index.
struct QuadrantParams {
  int d = 1;
  std::vector<double> alphas;  // α_1, α_2, ...; last entry repeats
  std::vector<double> betas;   // β_1, β_2, ...
  bool identity_disorder = false;

  static QuadrantParams homogeneous(int d, double theta, double u);

  double alpha(long n) const;
  double beta(long m) const;
  // Recurrence constraint: every α_n + β_m used must exceed (d-1)/2.
  void validate(long n_max, long m_max) const;
  // Stationary boundaries need α_n, β_m > (d-1)/2 themselves.
  void validate_stationary(long n_max, long m_max) const;
};

enum class StripRegime { MaximalCurrent, Equilibrium };

struct StripParams {
  int d = 1;
  std::vector<double> thetas;  // ϑ_1..ϑ_N, extended cyclically
  double u = 0.0;
  double v = 0.0;
  StripRegime regime = StripRegime::Equilibrium;
  bool identity_disorder = false;

  int width() const { return static_cast<int>(thetas.size()); }
  // ϑ_p with ϑ_p = ϑ_k for p ≡ k mod N.
  double theta(long p) const;
  void validate() const;
};

enum class LabelRule { Quadrant, StripMaximalCurrent, StripEquilibrium };

// γ_i for each step of the path: RIGHT into column n takes the column
// parameter, DOWN out of row m takes the row parameter.
std::vector<double> edge_labels(const DownRightPath& path, const QuadrantParams& params);
std::vector<double> edge_labels(const DownRightPath& path, const StripParams& params);

// Partition functions on [0,n_max] x [0,m_max].  Z(k,0) = B_k for k > 0 and
// Z(0,k) = B_{-k} for k >= 0.
class QuadrantField {
 public:
  QuadrantField(int d, long n_max, long m_max);

  int dim() const { return d_; }
  long n_max() const { return n_max_; }
  long m_max() const { return m_max_; }
  bool contains(const Point& p) const { return p.n >= 0 && p.m >= 0 && p.n <= n_max_ && p.m <= m_max_; }

  const Mat& at(long n, long m) const;
  Mat& at(long n, long m);
  const Mat& at(const Point& p) const { return at(p.n, p.m); }

  bool has_disorder() const { return !disorder_.empty(); }
  const Mat& disorder(long n, long m) const;
  void keep_disorder();
  Mat& disorder_slot(long n, long m);

 private:
  std::size_t index(long n, long m) const;

  int d_;
  long n_max_, m_max_;
  std::vector<Mat> values_;
  std::vector<Mat> disorder_;
};

struct EvolveOptions {
  bool keep_disorder = false;
  int threads = 1;  // workers per anti-diagonal
};

// W(n,m) ~ Wis⁻¹(α_n + β_m) drawn from stream seed.child(n, m).
Mat quadrant_disorder(const QuadrantParams& params, long n, long m, const Seed& seed);

QuadrantField quadrant_evolve(const QuadrantParams& params, const IndexedFamily& boundary,
                              long n_max, long m_max, const Seed& seed,
                              const EvolveOptions& opts = {});

std::vector<Mat> path_values(const QuadrantField& field, const DownRightPath& path);

struct OneStepResult {
  Mat u_prime;
  Mat v_prime;
};

// Z(0,1) = S, Z(0,0) = V⋆S, Z(1,0) = U⋆Z(0,0), Z(1,1) = W⋆(S + Z(1,0));
// U' = Z(1,1)⋆S⁻¹ and V' = Z(1,0)⋆Z(1,1)⁻¹.
OneStepResult one_step_update(const Mat& U, const Mat& V, const Mat& W, const Mat& S);

struct MartingaleTrace {
  std::vector<Mat> M;           // M(1..k_max), index 0 holds M(1)
  std::vector<Mat> raw_sums;    // Σ_{i+j=k} Z(i,j)
  std::vector<double> log_normalizer;  // log of the scalar dividing raw_sums[k-1]
  std::vector<double> log_det_diag;    // log|Z(n,n)| for n = 1..k_max/2
};

// Point-to-line sums under the delta boundary.  E Σ_{i+j=k} Z = c(2c)^{k-2} id
// for k >= 2 with c = c(2θ), so M(k) divides by that and M(1) = id.
MartingaleTrace point_to_line_martingale(int d, double theta, int k_max, const Seed& seed,
                                         bool identity_disorder = false);

// A draw of log|Z(n,n)| for the delta-boundary quadrant.  Each anti-diagonal is
// normalized by the congruence that maps its sum to the identity, which preserves the joint law but not the
// pathwise values of quadrant_evolve under the same seed.
double quadrant_delta_log_diag(const QuadrantParams& params, long n, const Seed& seed);

// ---------------------------------------------------------------------------
// Strip 0 <= n - m <= N.  Vertex i of a down-right path lies on diagonal
// n - m = i, so p_0 is on the left boundary and p_N on the right boundary.

// W at vertex (n,m) of the strip: bulk Wis⁻¹(ϑ_n+ϑ_m), left Wis⁻¹(ϑ_m+u),
// right Wis⁻¹(ϑ_m+v), drawn from seed.child(zigzag(n), zigzag(m)).
Mat strip_disorder(const StripParams& params, long n, long m, const Seed& seed);

struct StripState {
  DownRightPath path;
  std::vector<Mat> values;  // Z(p_0..p_N)
};

enum class RaiseKind { None, Left, Bulk, Right };

// Whether vertex i of the path can be moved by (1,1), and which recurrence
// case that move uses.
RaiseKind raise_kind(const DownRightPath& path, std::size_t i);

// Applies the recurrence at p_i + (1,1) and moves vertex i there.
void strip_raise(StripState& state, std::size_t i, const StripParams& params, const Seed& seed);

// Repeatedly raises the leftmost raisable vertex that is still below `target`,
// recording every intermediate state when `trace` is given.
void strip_raise_to(StripState& state, const DownRightPath& target, const StripParams& params,
                    const Seed& seed, std::vector<StripState>* trace = nullptr);

// Moves the path by (1,1) `steps` times; returns the state after each move.
std::vector<StripState> strip_evolve(const StripParams& params, const StripState& initial,
                                     int steps, const Seed& seed);

// Equilibrium initial condition: values along `path` form the Wis± walk with
// equilibrium labels started at S.
StripState strip_equilibrium_initial(const StripParams& params, const DownRightPath& path,
                                     const Mat& S, const Seed& seed);

// A draw of log|Z(n,n)| - log|Z(0,0)| after n diagonal moves of the horizontal
// path from the origin with equilibrium initial values, with the same
// congruence normalization as quadrant_delta_log_diag.
double strip_log_diag(const StripParams& params, long n, const Seed& seed);

}  // namespace ivp
