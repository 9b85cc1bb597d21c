#include "ivpoly/sampling.hpp"

#include "ivpoly/matfun.hpp"

#include <cmath>
#include <sstream>

namespace ivp {

void require_shape(int d, double theta, const char* what) {
  if (d < 1) throw ParameterError(std::string(what) + ": dimension must be positive");
  if (!(theta > 0.5 * (d - 1))) {
    std::ostringstream os;
    os << what << ": parameter " << theta << " must exceed (d-1)/2 = " << 0.5 * (d - 1);
    throw ParameterError(os.str());
  }
}

namespace {

// Lower-triangular Bartlett factor with M_kk^2 ~ Gamma(θ - k/2), M_ij ~ N(0, 1/2).
Mat bartlett_factor(int d, double theta, Philox& rng) {
  Mat m = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) m(k, k) = std::sqrt(rng.gamma(theta - 0.5 * k));
  const double sd = std::sqrt(0.5);
  for (int i = 1; i < d; ++i)
    for (int j = 0; j < i; ++j) m(i, j) = sd * rng.normal();
  return m;
}

}  // namespace

Mat sample_wishart(int d, double theta, Philox& rng) {
  require_shape(d, theta, "sample_wishart");
  if (d == 1) return Mat::Constant(1, 1, rng.gamma(theta));
  Mat m = bartlett_factor(d, theta, rng);
  return symmetrize(m * m.transpose());
}

Mat sample_wishart(int d, double theta, const Seed& seed) {
  Philox rng(seed);
  return sample_wishart(d, theta, rng);
}

Mat sample_inv_wishart(int d, double theta, Philox& rng) {
  require_shape(d, theta, "sample_inv_wishart");
  if (d == 1) return Mat::Constant(1, 1, 1.0 / rng.gamma(theta));
  Mat m = bartlett_factor(d, theta, rng);
  Mat minv = m.triangularView<Eigen::Lower>().solve(Mat::Identity(d, d));
  return symmetrize(minv.transpose() * minv);
}

Mat sample_inv_wishart(int d, double theta, const Seed& seed) {
  Philox rng(seed);
  return sample_inv_wishart(d, theta, rng);
}

double log_wishart_density(const Mat& x, double theta) {
  const int d = static_cast<int>(x.rows());
  return theta * logdet(x) - x.trace() - multigamma_ln(d, theta);
}

double log_inv_wishart_density(const Mat& x, double theta) {
  const int d = static_cast<int>(x.rows());
  return -theta * logdet(x) - spd_inverse(x).trace() - multigamma_ln(d, theta);
}

ProposalSpec::ProposalSpec(Kind k, double s, const Mat& sc) : kind(k), shape(s), scale(sc) {
  const int d = static_cast<int>(sc.rows());
  require_shape(d, s, "ProposalSpec");
  require_spd(sc, "ProposalSpec scale");
  scale_half_ = spd_sqrt(sc);
  scale_inv_ = spd_inverse(sc);
  scale_logdet_ = logdet(sc);
  log_norm_ = multigamma_ln(d, s);
}

Mat ProposalSpec::sample(Philox& rng) const {
  const int d = static_cast<int>(scale.rows());
  Mat w = kind == Kind::Wishart ? sample_wishart(d, shape, rng) : sample_inv_wishart(d, shape, rng);
  return symmetrize(scale_half_ * w * scale_half_);
}

double ProposalSpec::log_density(const Mat& x) const {
  const double ld = logdet(x);
  if (kind == Kind::Wishart) {
    return shape * (ld - scale_logdet_) - (scale_inv_.cwiseProduct(x)).sum() - log_norm_;
  }
  return shape * (scale_logdet_ - ld) - (scale.cwiseProduct(spd_inverse(x))).sum() - log_norm_;
}

GigParams::GigParams(double a_, const Mat& P_, const Mat& Q_) : a(a_), P(P_), Q(Q_) {
  require_same_dim(P, Q, "GigParams");
  if (P.rows() == 0 || P.rows() != P.cols()) throw ParameterError("GigParams: P must be square");
  p_zero = is_zero(P);
  q_zero = is_zero(Q);
  if (!p_zero && !is_spd(P)) throw ParameterError("GigParams: P must be zero or SPD");
  if (!q_zero && !is_spd(Q)) throw ParameterError("GigParams: Q must be zero or SPD");
  const double half = 0.5 * (dim() - 1);
  if (p_zero && q_zero) throw ParameterError("GigParams: P and Q cannot both vanish");
  if (p_zero && !(-a > half)) throw ParameterError("GigParams: P = 0 requires -a > (d-1)/2");
  if (q_zero && !(a > half)) throw ParameterError("GigParams: Q = 0 requires a > (d-1)/2");
}

double GigParams::log_unnormalized(const Mat& x) const {
  double v = a * logdet(x);
  if (!p_zero) v -= P.cwiseProduct(x).sum();
  if (!q_zero) v -= Q.cwiseProduct(spd_inverse(x)).sum();
  return v;
}

ProposalSpec GigParams::matched_proposal(ProposalSpec::Kind kind) const {
  const int d = dim();
  const double half = 0.5 * (d - 1);
  if (p_zero) return ProposalSpec(ProposalSpec::Kind::InverseWishart, -a, Q);
  if (q_zero) return ProposalSpec(ProposalSpec::Kind::Wishart, a, spd_inverse(P));
  // Scalar surrogate p x - a - q/x = 0 locates the mode on the log scale.
  const double p = std::exp(logdet(P) / d), q = std::exp(logdet(Q) / d);
  const double xstar = (a + std::sqrt(a * a + 4.0 * p * q)) / (2.0 * p);
  if (kind == ProposalSpec::Kind::InverseWishart) {
    return ProposalSpec(kind, std::max(p * xstar - a, half + 0.5), Q);
  }
  return ProposalSpec(kind, std::max(p * xstar, half + 0.5), spd_inverse(P));
}

ProposalSpec GigParams::default_proposal() const {
  return matched_proposal(a < 0 ? ProposalSpec::Kind::InverseWishart : ProposalSpec::Kind::Wishart);
}

Mat sample_matrix_gig(const GigParams& params, const Mat& current, int mh_steps, Philox& rng) {
  if (params.p_zero || params.q_zero) return params.default_proposal().sample(rng);
  if (mh_steps < 1) throw ParameterError("sample_matrix_gig: mh_steps must be positive");
  require_same_dim(current, params.P, "sample_matrix_gig");
  const int d = params.dim();
  const ProposalSpec prop = params.default_proposal();

  // Random-walk frame: whiten by a typical draw of the proposal so the step
  // size is scale free.
  Mat ref = prop.kind == ProposalSpec::Kind::Wishart ? Mat(prop.shape * prop.scale)
                                                     : Mat(prop.scale / prop.shape);
  Eigen::LLT<Mat> ref_llt(ref);
  const Mat c = ref_llt.matrixL();
  const Mat c_inv = c.triangularView<Eigen::Lower>().solve(Mat::Identity(d, d));
  const double sigma = 0.6 / std::sqrt(std::max(1.0, prop.shape) * d);

  Mat x = current;
  double lf = params.log_unnormalized(x);
  if (!std::isfinite(lf)) throw NumericalError("sample_matrix_gig: current state has nonfinite density");
  double lq = prop.log_density(x);
  for (int s = 0; s < mh_steps; ++s) {
    Mat y = prop.sample(rng);
    const double lfy = params.log_unnormalized(y), lqy = prop.log_density(y);
    const double log_ratio = (lfy - lqy) - (lf - lq);
    if (std::isnan(log_ratio)) throw NumericalError("sample_matrix_gig: nonfinite acceptance ratio");
    if (std::log(rng.uniform()) < log_ratio) {
      x = std::move(y);
      lf = lfy;
      lq = lqy;
    }

    Vec z = log_cholesky_coords(symmetrize(c_inv * x * c_inv.transpose()));
    Vec z_new = z;
    for (Eigen::Index i = 0; i < z.size(); ++i) z_new(i) += sigma * rng.normal();
    Mat x_new = symmetrize(c * from_log_cholesky(z_new, d) * c.transpose());
    const double lf_new = params.log_unnormalized(x_new);
    const double log_rw = (lf_new + log_cholesky_log_jacobian(z_new, d)) -
                          (lf + log_cholesky_log_jacobian(z, d));
    if (std::isnan(log_rw)) throw NumericalError("sample_matrix_gig: nonfinite acceptance ratio");
    if (std::log(rng.uniform()) < log_rw) {
      x = std::move(x_new);
      lf = lf_new;
      lq = prop.log_density(x);
    }
  }
  return x;
}

Mat sample_matrix_gig(const GigParams& params, const Mat& current, int mh_steps, const Seed& seed) {
  Philox rng(seed);
  return sample_matrix_gig(params, current, mh_steps, rng);
}

std::vector<Mat> sample_walk(const WalkSpec& spec, const Seed& seed) {
  if (spec.gammas.size() != spec.word.size()) {
    throw ParameterError("sample_walk: gammas and word lengths differ");
  }
  require_spd(spec.start, "sample_walk start");
  const int d = static_cast<int>(spec.start.rows());
  for (double g : spec.gammas) require_shape(d, g, "sample_walk");
  std::vector<Mat> out;
  out.reserve(spec.word.size() + 1);
  out.push_back(spec.start);
  for (std::size_t k = 0; k < spec.word.size(); ++k) {
    Philox rng(seed.child(k));
    Mat x = spec.word[k] == Step::Right ? sample_inv_wishart(d, spec.gammas[k], rng)
                                        : sample_wishart(d, spec.gammas[k], rng);
    out.push_back(star(x, out.back()));
  }
  return out;
}

const Mat& IndexedFamily::at(long k) const {
  if (k < kmin || k > kmax()) throw ParameterError("IndexedFamily: index out of range");
  return values[static_cast<std::size_t>(k - kmin)];
}

Mat& IndexedFamily::at(long k) {
  if (k < kmin || k > kmax()) throw ParameterError("IndexedFamily: index out of range");
  return values[static_cast<std::size_t>(k - kmin)];
}

IndexedFamily sample_two_sided_walk(double alpha, double beta, const Mat& S0, int m, int n,
                                    const Seed& seed) {
  require_spd(S0, "sample_two_sided_walk start");
  const int d = static_cast<int>(S0.rows());
  require_shape(d, alpha, "sample_two_sided_walk alpha");
  require_shape(d, beta, "sample_two_sided_walk beta");
  if (m < 0 || n < 0) throw ParameterError("sample_two_sided_walk: extents must be nonnegative");
  IndexedFamily f;
  f.kmin = -m;
  f.values.assign(static_cast<std::size_t>(m + n + 1), S0);
  for (long k = 1; k <= n; ++k) {
    f.at(k) = star(sample_inv_wishart(d, alpha, seed.child(zigzag(k))), f.at(k - 1));
  }
  for (long k = 1; k <= m; ++k) {
    f.at(-k) = star(sample_inv_wishart(d, beta, seed.child(zigzag(-k))), f.at(-(k - 1)));
  }
  return f;
}

void BoundarySpec::validate() const {
  require_shape(d, theta + u, "BoundarySpec theta+u");
  require_shape(d, theta - u, "BoundarySpec theta-u");
  if (M < 0) throw ParameterError("BoundarySpec: M must be nonnegative");
  if (reference) {
    require_spd(*reference, "BoundarySpec reference");
    if (reference->rows() != d) throw ParameterError("BoundarySpec: reference dimension mismatch");
  }
}

IndexedFamily sample_stationary_boundary(const BoundarySpec& spec, int m_max, int n_max,
                                         const Seed& seed) {
  spec.validate();
  if (m_max < spec.M) throw ParameterError("sample_stationary_boundary: m_max < M");
  if (n_max < 0) throw ParameterError("sample_stationary_boundary: n_max must be nonnegative");
  const int d = spec.d;
  IndexedFamily f;
  f.kmin = -m_max;
  f.values.assign(static_cast<std::size_t>(m_max + n_max + 1), Mat());
  f.at(-spec.M) = spec.reference ? *spec.reference : identity(d);
  // Above the reference row: B_{k-1} = Wis⁻¹(θ+u) ⋆ B_k.
  for (long k = -spec.M; k > -m_max; --k) {
    f.at(k - 1) = star(sample_inv_wishart(d, spec.theta + spec.u, seed.child(zigzag(k - 1))), f.at(k));
  }
  // Down to the origin: B_k = Wis(θ+u) ⋆ B_{k-1}.
  for (long k = -spec.M + 1; k <= 0; ++k) {
    f.at(k) = star(sample_wishart(d, spec.theta + spec.u, seed.child(zigzag(k))), f.at(k - 1));
  }
  // Along the bottom axis: B_k = Wis⁻¹(θ-u) ⋆ B_{k-1}.
  for (long k = 1; k <= n_max; ++k) {
    f.at(k) = star(sample_inv_wishart(d, spec.theta - spec.u, seed.child(zigzag(k))), f.at(k - 1));
  }
  return f;
}

IndexedFamily delta_boundary(int d, int m_max, int n_max) {
  IndexedFamily f;
  f.kmin = -m_max;
  f.values.assign(static_cast<std::size_t>(m_max + n_max + 1), zeros(d));
  if (n_max >= 1) f.at(1) = identity(d);
  return f;
}

}  // namespace ivp
