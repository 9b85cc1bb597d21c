#include "ivpoly/spd.hpp"

#include <cmath>
#include <sstream>

namespace ivp {

namespace {

Eigen::SelfAdjointEigenSolver<Mat> eigen_of(const Mat& y, const char* op) {
  Eigen::SelfAdjointEigenSolver<Mat> es(y);
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string(op) + ": eigendecomposition failed");
  }
  if (es.eigenvalues()(0) <= 0.0) {
    std::ostringstream os;
    os << op << ": matrix not positive definite (min eigenvalue "
       << es.eigenvalues()(0) << ")";
    throw NumericalError(os.str());
  }
  return es;
}

}  // namespace

Mat identity(int d) { return Mat::Identity(d, d); }

Mat zeros(int d) { return Mat::Zero(d, d); }

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return ((m - m.transpose()).cwiseAbs().maxCoeff()) <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool is_spd(const Mat& m) {
  if (m.rows() == 0 || !is_symmetric(m)) return false;
  Eigen::LLT<Mat> llt(m);
  return llt.info() == Eigen::Success;
}

bool is_psd(const Mat& m, double tol) {
  if (m.rows() == 0 || !is_symmetric(m)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues()(0) >= -tol;
}

bool is_zero(const Mat& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

void require_spd(const Mat& m, const std::string& what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ParameterError(what + ": matrix must be square and nonempty");
  }
  if (!is_spd(m)) throw ParameterError(what + ": matrix is not symmetric positive definite");
}

void require_same_dim(const Mat& a, const Mat& b, const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows()
       << "x" << b.cols() << ")";
    throw ParameterError(os.str());
  }
}

Mat spd_sqrt(const Mat& y) {
  if (y.rows() == 1) {
    if (!(y(0, 0) > 0.0)) throw NumericalError("spd_sqrt: nonpositive scalar");
    return Mat::Constant(1, 1, std::sqrt(y(0, 0)));
  }
  auto es = eigen_of(y, "spd_sqrt");
  const Mat& v = es.eigenvectors();
  return symmetrize(v * es.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose());
}

Mat spd_inv_sqrt(const Mat& y) {
  if (y.rows() == 1) {
    if (!(y(0, 0) > 0.0)) throw NumericalError("spd_inv_sqrt: nonpositive scalar");
    return Mat::Constant(1, 1, 1.0 / std::sqrt(y(0, 0)));
  }
  auto es = eigen_of(y, "spd_inv_sqrt");
  const Mat& v = es.eigenvectors();
  return symmetrize(v * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose());
}

Mat psd_sqrt(const Mat& y, double rel_tol, double scale) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(y));
  if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  if (lam(0) < -rel_tol * std::max(lam(lam.size() - 1), scale) || !(lam(lam.size() - 1) >= 0.0)) {
    std::ostringstream os;
    os << "psd_sqrt: matrix not positive semidefinite (min eigenvalue " << lam(0) << ")";
    throw NumericalError(os.str());
  }
  const Mat& v = es.eigenvectors();
  return symmetrize(v * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal() * v.transpose());
}

double congruence_normalize(std::vector<Mat>& xs, const Mat& ref) {
  const Mat g = spd_inv_sqrt(ref);
  const double ld = logdet(ref);
  for (Mat& x : xs) x = symmetrize(g * x * g);
  return ld;
}

Mat spd_inverse(const Mat& y) {
  if (y.rows() == 1) {
    if (!(y(0, 0) > 0.0)) throw NumericalError("spd_inverse: nonpositive scalar");
    return Mat::Constant(1, 1, 1.0 / y(0, 0));
  }
  Eigen::LLT<Mat> llt(y);
  if (llt.info() != Eigen::Success) throw NumericalError("spd_inverse: Cholesky failed");
  return symmetrize(llt.solve(Mat::Identity(y.rows(), y.cols())));
}

Mat star(const Mat& x, const Mat& y) {
  require_same_dim(x, y, "star");
  if (y.rows() == 1) {
    if (!(y(0, 0) > 0.0)) throw NumericalError("star: right argument not positive");
    return Mat::Constant(1, 1, x(0, 0) * y(0, 0));
  }
  Mat r = spd_sqrt(y);
  return symmetrize(r * x * r);
}

double logdet(const Mat& x) {
  if (x.rows() == 1) {
    if (!(x(0, 0) > 0.0)) throw NumericalError("logdet: nonpositive scalar");
    return std::log(x(0, 0));
  }
  Eigen::LLT<Mat> llt(x);
  if (llt.info() != Eigen::Success) throw NumericalError("logdet: Cholesky failed");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Mat change_of_variable(const Mat& W, const Mat& V, const Mat& Y) {
  require_same_dim(W, V, "change_of_variable");
  require_same_dim(W, Y, "change_of_variable");
  Mat w_half = spd_sqrt(W);
  Mat w_inv_half = spd_inv_sqrt(W);
  Mat u = symmetrize(w_half * V * w_half);
  Mat a = w_inv_half * spd_sqrt(u) * w_inv_half;
  return spd_inverse(symmetrize(a * Y * a.transpose()));
}

Mat increment(const Mat& prev, const Mat& next) {
  require_same_dim(prev, next, "increment");
  if (prev.rows() == 1) return Mat::Constant(1, 1, next(0, 0) / prev(0, 0));
  Mat r = spd_inv_sqrt(prev);
  return symmetrize(r * next * r);
}

Vec spd_eigenvalues(const Mat& x) {
  if (x.rows() == 1) return Vec::Constant(1, x(0, 0));
  Eigen::SelfAdjointEigenSolver<Mat> es(x, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("spd_eigenvalues: solver failed");
  return es.eigenvalues();
}

double minkowski_slack(const Mat& a, const Mat& b) {
  const double d = static_cast<double>(a.rows());
  return std::exp(logdet(a + b) / d) - std::exp(logdet(a) / d) - std::exp(logdet(b) / d);
}

Vec log_cholesky_coords(const Mat& x) {
  const int d = static_cast<int>(x.rows());
  Eigen::LLT<Mat> llt(x);
  if (llt.info() != Eigen::Success) throw NumericalError("log_cholesky_coords: Cholesky failed");
  Mat l = llt.matrixL();
  Vec z(d * (d + 1) / 2);
  int k = 0;
  for (int i = 0; i < d; ++i) z(k++) = std::log(l(i, i));
  for (int i = 1; i < d; ++i)
    for (int j = 0; j < i; ++j) z(k++) = l(i, j);
  return z;
}

Mat from_log_cholesky(const Vec& z, int d) {
  Mat l = Mat::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) l(i, i) = std::exp(z(k++));
  for (int i = 1; i < d; ++i)
    for (int j = 0; j < i; ++j) l(i, j) = z(k++);
  return symmetrize(l * l.transpose());
}

// dx = 2^d prod_i L_ii^{d-i+1} dL (1-based i), dL_ii = L_ii dlog L_ii, and
// dμ = |x|^{-(d+1)/2} dx, which leaves 2^d prod_i L_ii^{1-i}.
double log_cholesky_log_jacobian(const Vec& z, int d) {
  double s = d * std::log(2.0);
  for (int i = 0; i < d; ++i) s -= i * z(i);
  return s;
}

}  // namespace ivp
