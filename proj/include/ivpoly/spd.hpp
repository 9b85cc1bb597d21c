#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ivp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Thrown when a Cholesky or eigen factorization fails on data that should be
// positive definite. The message carries the context (vertex, iteration, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on parameter or shape violations.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-9;
};

Mat identity(int d);
Mat zeros(int d);
Mat symmetrize(const Mat& m);

bool is_symmetric(const Mat& m, double tol = 1e-12);
bool is_spd(const Mat& m);
bool is_psd(const Mat& m, double tol = 1e-12);
bool is_zero(const Mat& m);

// Throws ParameterError unless m is square, symmetric and SPD.
void require_spd(const Mat& m, const std::string& what);
void require_same_dim(const Mat& a, const Mat& b, const std::string& what);

// x ⋆ y = y^{1/2} x y^{1/2}.  x may be PSD (including 0), y must be SPD.
Mat star(const Mat& x, const Mat& y);

// Unique SPD square root via symmetric eigendecomposition.
Mat spd_sqrt(const Mat& y);
Mat spd_inv_sqrt(const Mat& y);
Mat spd_inverse(const Mat& y);

// Square root of a PSD matrix.  Eigenvalues down to -rel_tol times the larger
// of the top eigenvalue and `scale` are treated as rounding and clamped to zero.
Mat psd_sqrt(const Mat& y, double rel_tol = 1e-10, double scale = 0.0);

// Replaces each x by g x g with g = ref^{-1/2} and returns log|ref|.
double congruence_normalize(std::vector<Mat>& xs, const Mat& ref);

// log|x| via Cholesky.
double logdet(const Mat& x);

// The matrix X with tr[W X^{-1}] = tr[V Y] and tr[V X] = tr[W Y^{-1}].
Mat change_of_variable(const Mat& W, const Mat& V, const Mat& Y);

// The ⋆-increment taking prev to next: next ⋆ prev^{-1} = prev^{-1/2} next prev^{-1/2}.
Mat increment(const Mat& prev, const Mat& next);

// Eigenvalues of an SPD matrix, ascending.
Vec spd_eigenvalues(const Mat& x);

// Minkowski: |A|^{1/d} + |B|^{1/d} <= |A+B|^{1/d}.  Returns the slack
// |A+B|^{1/d} - |A|^{1/d} - |B|^{1/d}, nonnegative up to rounding.
double minkowski_slack(const Mat& a, const Mat& b);

// Unconstrained coordinates of an SPD matrix x = L L^T: the d log-diagonal
// entries of L followed by its strictly lower entries (row by row).
Vec log_cholesky_coords(const Mat& x);
Mat from_log_cholesky(const Vec& z, int d);
// log of dμ(x)/dz at z, the density of the reference measure in these coordinates.
double log_cholesky_log_jacobian(const Vec& z, int d);

}  // namespace ivp
