#include "ivpoly/polymer.hpp"

#include "ivpoly/matfun.hpp"
#include "ivpoly/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace ivp {

std::vector<Point> DownRightPath::vertices() const {
  std::vector<Point> pts;
  pts.reserve(word.size() + 1);
  pts.push_back(start);
  for (Step s : word) {
    Point p = pts.back();
    if (s == Step::Right) {
      ++p.n;
    } else {
      --p.m;
    }
    pts.push_back(p);
  }
  return pts;
}

DownRightPath DownRightPath::from_vertices(const std::vector<Point>& pts) {
  if (pts.empty()) throw ParameterError("DownRightPath: no vertices");
  DownRightPath path;
  path.start = pts.front();
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const long dn = pts[k].n - pts[k - 1].n, dm = pts[k].m - pts[k - 1].m;
    if (dn == 1 && dm == 0) {
      path.word.push_back(Step::Right);
    } else if (dn == 0 && dm == -1) {
      path.word.push_back(Step::Down);
    } else {
      std::ostringstream os;
      os << "DownRightPath: step " << k << " is neither (1,0) nor (0,-1)";
      throw ParameterError(os.str());
    }
  }
  return path;
}

std::vector<Step> DownRightPath::parse_word(const std::string& s) {
  std::vector<Step> w;
  for (char ch : s) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (c == 'R') {
      w.push_back(Step::Right);
    } else if (c == 'D') {
      w.push_back(Step::Down);
    } else if (c != ',' && c != ' ') {
      throw ParameterError(std::string("parse_word: unexpected character '") + ch + "'");
    }
  }
  return w;
}

std::string DownRightPath::word_string(const std::vector<Step>& w) {
  std::string s;
  for (Step x : w) s.push_back(x == Step::Right ? 'R' : 'D');
  return s;
}

QuadrantParams QuadrantParams::homogeneous(int d, double theta, double u) {
  QuadrantParams p;
  p.d = d;
  p.alphas = {theta - u};
  p.betas = {theta + u};
  return p;
}

double QuadrantParams::alpha(long n) const {
  if (alphas.empty() || n < 1) throw ParameterError("QuadrantParams: alpha index out of range");
  return alphas[static_cast<std::size_t>(std::min<long>(n, static_cast<long>(alphas.size())) - 1)];
}

double QuadrantParams::beta(long m) const {
  if (betas.empty() || m < 1) throw ParameterError("QuadrantParams: beta index out of range");
  return betas[static_cast<std::size_t>(std::min<long>(m, static_cast<long>(betas.size())) - 1)];
}

void QuadrantParams::validate(long n_max, long m_max) const {
  if (d < 1) throw ParameterError("QuadrantParams: d must be positive");
  if (alphas.empty() || betas.empty()) throw ParameterError("QuadrantParams: empty parameter list");
  const long nn = std::min<long>(n_max, static_cast<long>(alphas.size()));
  const long mm = std::min<long>(m_max, static_cast<long>(betas.size()));
  for (long n = 1; n <= std::max<long>(nn, 1); ++n)
    for (long m = 1; m <= std::max<long>(mm, 1); ++m) {
      if (!(alpha(n) + beta(m) > 0.5 * (d - 1))) {
        std::ostringstream os;
        os << "QuadrantParams: alpha_" << n << " + beta_" << m << " = " << alpha(n) + beta(m)
           << " must exceed (d-1)/2 = " << 0.5 * (d - 1);
        throw ParameterError(os.str());
      }
    }
}

void QuadrantParams::validate_stationary(long n_max, long m_max) const {
  validate(n_max, m_max);
  for (long n = 1; n <= std::max<long>(1, std::min<long>(n_max, static_cast<long>(alphas.size()))); ++n)
    require_shape(d, alpha(n), "QuadrantParams alpha (theta - u)");
  for (long m = 1; m <= std::max<long>(1, std::min<long>(m_max, static_cast<long>(betas.size()))); ++m)
    require_shape(d, beta(m), "QuadrantParams beta (theta + u)");
}

double StripParams::theta(long p) const {
  const long N = width();
  if (N < 1) throw ParameterError("StripParams: empty theta list");
  return thetas[static_cast<std::size_t>(((p % N) + N - 1) % N)];
}

void StripParams::validate() const {
  if (d < 1) throw ParameterError("StripParams: d must be positive");
  if (thetas.empty()) throw ParameterError("StripParams: width N must be at least 1");
  const double half = 0.5 * (d - 1);
  auto need = [&](double x, const std::string& what) {
    if (!(x > half)) {
      std::ostringstream os;
      os << "StripParams: " << what << " = " << x << " must exceed (d-1)/2 = " << half;
      throw ParameterError(os.str());
    }
  };
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    need(thetas[i] + u, "theta_" + std::to_string(i + 1) + " + u");
    need(thetas[i] + v, "theta_" + std::to_string(i + 1) + " + v");
    for (std::size_t j = 0; j < thetas.size(); ++j)
      need(thetas[i] + thetas[j], "theta_" + std::to_string(i + 1) + " + theta_" + std::to_string(j + 1));
  }
  if (regime == StripRegime::Equilibrium) {
    if (std::abs(u + v) > 1e-12) throw ParameterError("StripParams: equilibrium regime needs u + v = 0");
  } else {
    need(u + v, "u + v");
  }
}

std::vector<double> edge_labels(const DownRightPath& path, const QuadrantParams& params) {
  const auto pts = path.vertices();
  std::vector<double> g;
  g.reserve(path.length());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (pts[k].n < 0 || pts[k].m < 0) throw ParameterError("edge_labels: path leaves the quadrant");
    if (path.word[k - 1] == Step::Right) {
      g.push_back(params.alpha(pts[k].n));
    } else {
      g.push_back(params.beta(pts[k - 1].m));
    }
  }
  return g;
}

std::vector<double> edge_labels(const DownRightPath& path, const StripParams& params) {
  if (static_cast<int>(path.length()) != params.width() || path.start.n != path.start.m) {
    throw ParameterError("edge_labels: path must join the two strip boundaries");
  }
  const auto pts = path.vertices();
  const bool eq = params.regime == StripRegime::Equilibrium;
  std::vector<double> g;
  g.reserve(path.length());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (path.word[k - 1] == Step::Right) {
      g.push_back(params.theta(pts[k].n) + (eq ? params.v : 0.0));
    } else {
      g.push_back(params.theta(pts[k - 1].m) + (eq ? params.u : 0.0));
    }
  }
  return g;
}

QuadrantField::QuadrantField(int d, long n_max, long m_max) : d_(d), n_max_(n_max), m_max_(m_max) {
  if (n_max < 0 || m_max < 0) throw ParameterError("QuadrantField: negative extent");
  values_.assign(static_cast<std::size_t>((n_max + 1) * (m_max + 1)), zeros(d));
}

std::size_t QuadrantField::index(long n, long m) const {
  if (!contains({n, m})) {
    std::ostringstream os;
    os << "QuadrantField: vertex (" << n << "," << m << ") outside [0," << n_max_ << "]x[0," << m_max_ << "]";
    throw ParameterError(os.str());
  }
  return static_cast<std::size_t>(n * (m_max_ + 1) + m);
}

const Mat& QuadrantField::at(long n, long m) const { return values_[index(n, m)]; }
Mat& QuadrantField::at(long n, long m) { return values_[index(n, m)]; }

void QuadrantField::keep_disorder() { disorder_.assign(values_.size(), Mat()); }

const Mat& QuadrantField::disorder(long n, long m) const {
  if (disorder_.empty()) throw ParameterError("QuadrantField: disorder was not kept");
  return disorder_[index(n, m)];
}

Mat& QuadrantField::disorder_slot(long n, long m) { return disorder_[index(n, m)]; }

Mat quadrant_disorder(const QuadrantParams& params, long n, long m, const Seed& seed) {
  if (params.identity_disorder) return identity(params.d);
  return sample_inv_wishart(params.d, params.alpha(n) + params.beta(m), seed.child(n, m));
}

namespace {

Mat bulk_step(const Mat& w, const Mat& sum, long n, long m) {
  if (is_zero(sum)) return zeros(static_cast<int>(w.rows()));
  try {
    return star(w, sum);
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << e.what() << " at vertex (" << n << "," << m << ")";
    throw NumericalError(os.str());
  }
}

}  // namespace

QuadrantField quadrant_evolve(const QuadrantParams& params, const IndexedFamily& boundary,
                              long n_max, long m_max, const Seed& seed, const EvolveOptions& opts) {
  params.validate(n_max, m_max);
  if (boundary.kmin > -m_max || boundary.kmax() < n_max) {
    throw ParameterError("quadrant_evolve: boundary does not cover the rectangle");
  }
  QuadrantField f(params.d, n_max, m_max);
  if (opts.keep_disorder) f.keep_disorder();
  for (long k = 1; k <= n_max; ++k) f.at(k, 0) = boundary.at(k);
  for (long k = 0; k <= m_max; ++k) f.at(0, k) = boundary.at(-k);
  for (long diag = 2; diag <= n_max + m_max; ++diag) {
    const long lo = std::max<long>(1, diag - m_max), hi = std::min<long>(n_max, diag - 1);
    if (hi < lo) continue;
    parallel_for(
        static_cast<std::size_t>(hi - lo + 1),
        [&](std::size_t idx) {
          const long n = lo + static_cast<long>(idx), m = diag - n;
          Mat w = quadrant_disorder(params, n, m, seed);
          f.at(n, m) = bulk_step(w, f.at(n - 1, m) + f.at(n, m - 1), n, m);
          if (opts.keep_disorder) f.disorder_slot(n, m) = std::move(w);
        },
        opts.threads);
  }
  return f;
}

std::vector<Mat> path_values(const QuadrantField& field, const DownRightPath& path) {
  std::vector<Mat> out;
  for (const Point& p : path.vertices()) {
    if (!field.contains(p)) throw ParameterError("path_values: path leaves the field");
    out.push_back(field.at(p));
  }
  return out;
}

OneStepResult one_step_update(const Mat& U, const Mat& V, const Mat& W, const Mat& S) {
  require_same_dim(U, V, "one_step_update");
  require_same_dim(U, W, "one_step_update");
  require_same_dim(U, S, "one_step_update");
  const Mat z00 = star(V, S);
  const Mat z10 = star(U, z00);
  const Mat z11 = star(W, S + z10);
  return {increment(S, z11), increment(z11, z10)};
}

namespace {

// Next anti-diagonal of the delta-boundary quadrant, restricted to columns
// [lo, hi].  prev and the result are indexed by column n.  Vertices far from
// the diagonal become numerically rank deficient; negative eigenvalues of size
// up to 1e-8 * max(top eigenvalue, psd_scale) are treated as rounding.
std::vector<Mat> next_delta_diagonal(const QuadrantParams& params, const std::vector<Mat>& prev, long diag,
                                     long lo, long hi, double psd_scale, const Seed& seed) {
  std::vector<Mat> cur(static_cast<std::size_t>(diag + 1), zeros(params.d));
  for (long n = lo; n <= hi; ++n) {
    const long m = diag - n;
    if (n == 0 || m == 0) {
      if (n == 1 && m == 0) cur[1] = identity(params.d);
      continue;
    }
    const Mat sum = prev[static_cast<std::size_t>(n - 1)] + prev[static_cast<std::size_t>(n)];
    if (is_zero(sum)) continue;
    const Mat r = psd_sqrt(sum, 1e-8, psd_scale);
    cur[static_cast<std::size_t>(n)] = symmetrize(r * quadrant_disorder(params, n, m, seed) * r);
  }
  return cur;
}

}  // namespace

MartingaleTrace point_to_line_martingale(int d, double theta, int k_max, const Seed& seed,
                                         bool identity_disorder) {
  if (k_max < 1) throw ParameterError("point_to_line_martingale: k_max must be positive");
  const double c = inv_wishart_mean_constant(d, 2.0 * theta);
  QuadrantParams params = QuadrantParams::homogeneous(d, theta, 0.0);
  params.identity_disorder = identity_disorder;
  params.validate(k_max, k_max);

  MartingaleTrace t;
  std::vector<Mat> diag = {zeros(d)};  // Z(0,0)
  for (long k = 1; k <= k_max; ++k) {
    diag = next_delta_diagonal(params, diag, k, 0, k, 0.0, seed);
    Mat sum = zeros(d);
    for (const Mat& z : diag) sum += z;
    const double log_norm = k == 1 ? 0.0 : std::log(c) + static_cast<double>(k - 2) * std::log(2.0 * c);
    t.raw_sums.push_back(sum);
    t.log_normalizer.push_back(log_norm);
    t.M.push_back(sum * std::exp(-log_norm));
    if (k % 2 == 0) t.log_det_diag.push_back(logdet(diag[static_cast<std::size_t>(k / 2)]));
  }
  return t;
}

double quadrant_delta_log_diag(const QuadrantParams& params, long n, const Seed& seed) {
  if (n < 1) throw ParameterError("quadrant_delta_log_diag: n must be positive");
  params.validate(n, n);
  // Each anti-diagonal is brought to the gauge in which its sum is the
  // identity (exact in law, since the disorder is conjugation invariant).
  // Vertices with trace below kDrop in that gauge are set to zero and leave
  // the active window.
  constexpr double kDrop = 1e-40;
  const int d = params.d;
  std::vector<Mat> diag = {zeros(d)};
  double log_gauge = 0.0;
  long lo_active = 0, hi_active = 0;
  for (long k = 1; k <= 2 * n; ++k) {
    const long lo = std::max<long>({0, k - n, lo_active}), hi = std::min<long>({n, k, hi_active + 1});
    diag = next_delta_diagonal(params, diag, k, lo, hi, 1.0, seed);
    Mat total = zeros(d);
    for (long j = lo; j <= hi; ++j) total += diag[static_cast<std::size_t>(j)];
    log_gauge += congruence_normalize(diag, total);
    lo_active = hi + 1;
    hi_active = lo - 1;
    for (long j = lo; j <= hi; ++j) {
      Mat& z = diag[static_cast<std::size_t>(j)];
      if (z.trace() < kDrop) {
        z = zeros(d);
      } else {
        lo_active = std::min(lo_active, j);
        hi_active = std::max(hi_active, j);
      }
    }
  }
  return logdet(diag[static_cast<std::size_t>(n)]) + log_gauge;
}

}  // namespace ivp
