#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

// Square complex matrices carrying the tolerance they are judged by.
//
// Every predicate below is of the form "defect <= tol * scale" with a
// nonnegative defect and a fixed scale, so loosening tol can never flip a
// predicate from true to false.

namespace iso3 {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct OperatorMatrix {
  Mat a;
  double tol = 1e-10;

  OperatorMatrix() = default;
  explicit OperatorMatrix(Mat m, double t = 1e-10) : a(std::move(m)), tol(t) {}

  Eigen::Index dim() const { return a.rows(); }
};

// Largest singular value.
double opnorm(const Mat& a);

// Smallest eigenvalue of the Hermitian part (a + a*)/2.
double lambda_min(const Mat& a);
double lambda_max(const Mat& a);

// (a + a*)/2.
Mat hermitize(const Mat& a);

// a^k for any integer k; negative powers solve with partial-pivot LU and
// refuse matrices whose condition estimate exceeds cond_cap.
Mat matpow(const Mat& a, long k, double cond_cap = 1e12);

// Unitary polar factor (SVD-based, defined for full column rank input).
Mat polar_unitary(const Mat& a);

bool is_hermitian(const OperatorMatrix& t);
bool is_unitary(const OperatorMatrix& t);
bool is_isometry(const Mat& v, double tol);  // v*v = I, possibly rectangular
bool is_psd(const OperatorMatrix& t);

// largest |eigenvalue|
double spectral_radius(const Mat& a);

// sorted-by-argument greedy multiset match; true when the two eigenvalue
// multisets pair up within tol
bool spectra_match(const Vec& a, const Vec& b, double tol = 1e-8);

// one-sided Hausdorff-style distances between eigenvalue multisets
double spectra_hausdorff(const Vec& a, const Vec& b);

std::string fmt_cx(const cx& z);

}  // namespace iso3
