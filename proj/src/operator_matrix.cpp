#include "iso3/operator_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace iso3 {

double opnorm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

double lambda_min(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double lambda_max(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat matpow(const Mat& a, long k, double cond_cap) {
  const Eigen::Index n = a.rows();
  Mat base = a;
  if (k < 0) {
    Eigen::JacobiSVD<Mat> svd(a);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(n - 1);
    if (smin <= 0.0 || smax / smin > cond_cap)
      throw std::domain_error("matpow: negative power of a near-singular matrix (cond > cap)");
    base = a.partialPivLu().solve(Mat::Identity(n, n));
    k = -k;
  }
  Mat r = Mat::Identity(n, n);
  while (k > 0) {  // square-and-multiply
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

Mat polar_unitary(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

bool is_hermitian(const OperatorMatrix& t) {
  const double scale = std::max(1.0, t.a.norm());
  return (t.a - t.a.adjoint()).norm() <= t.tol * scale;
}

bool is_unitary(const OperatorMatrix& t) {
  const Eigen::Index n = t.dim();
  const double scale = std::max(1.0, t.a.squaredNorm());
  return (t.a.adjoint() * t.a - Mat::Identity(n, n)).norm() <= t.tol * scale &&
         (t.a * t.a.adjoint() - Mat::Identity(n, n)).norm() <= t.tol * scale;
}

bool is_isometry(const Mat& v, double tol) {
  const Eigen::Index n = v.cols();
  const double scale = std::max(1.0, v.squaredNorm());
  return (v.adjoint() * v - Mat::Identity(n, n)).norm() <= tol * scale;
}

bool is_psd(const OperatorMatrix& t) {
  const double scale = std::max(1.0, t.a.norm());
  if ((t.a - t.a.adjoint()).norm() > t.tol * scale) return false;
  return lambda_min(t.a) >= -t.tol * scale;
}

double spectral_radius(const Mat& a) {
  Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {
std::vector<cx> sorted_by_arg(const Vec& v) {
  std::vector<cx> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](const cx& x, const cx& y) {
    const double ax = std::arg(x), ay = std::arg(y);
    if (ax != ay) return ax < ay;
    return std::abs(x) < std::abs(y);
  });
  return out;
}
}  // namespace

bool spectra_match(const Vec& a, const Vec& b, double tol) {
  if (a.size() != b.size()) return false;
  auto sa = sorted_by_arg(a), sb = sorted_by_arg(b);
  for (size_t i = 0; i < sa.size(); ++i)
    if (std::abs(sa[i] - sb[i]) > tol) return false;
  return true;
}

double spectra_hausdorff(const Vec& a, const Vec& b) {
  auto one_sided = [](const Vec& x, const Vec& y) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < y.size(); ++j)
        best = std::min(best, std::abs(x(i) - y(j)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.size() == 0 || b.size() == 0) return (a.size() == b.size()) ? 0.0 : std::numeric_limits<double>::infinity();
  return std::max(one_sided(a, b), one_sided(b, a));
}

std::string fmt_cx(const cx& z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real();
  if (z.imag() >= 0)
    os << "+" << z.imag() << "i";
  else
    os << z.imag() << "i";
  return os.str();
}

}  // namespace iso3
