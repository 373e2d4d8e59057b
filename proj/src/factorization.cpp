#include "iso3/factorization.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace iso3 {

namespace {

// PSD square root with small negative eigenvalues clipped to zero. Returns
// nullopt if an eigenvalue is more negative than the clip band; clip_abs lets
// a caller widen the band to the accuracy its certificate was computed at.
std::optional<Mat> psd_sqrt(const Mat& g, double clip_tol, double clip_abs = 0.0) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(g));
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  const double band = std::max(clip_tol * scale, clip_abs);
  Eigen::VectorXd root(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -band) return std::nullopt;
    root(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return Mat(root.asDiagonal() * es.eigenvectors().adjoint());
}

// Spectral factorization through the stable solvent. When b2 is positive
// definite, the roots of det(b0 + s b1 + s^2 b2) avoid the real axis for a
// strictly positive pencil and split into conjugate half-plane pairs. The
// companion matrix [[0, I], [-b2^{-1} b0, -b2^{-1} b1]] has those roots as
// eigenvalues; stacking the eigenvectors of the lower half-plane ones as
// [W1; W2] gives X = W2 W1^{-1} with b2 X^2 + b1 X + b0 = 0, and then
// q(s) = (sI - X)* b2 (sI - X) exactly: the mismatch pencil sA + B satisfies
// A X = X* A, and spec(X) and spec(X*) are disjoint, so A = 0 by uniqueness
// of the Sylvester solution. One eigendecomposition, no iteration.
std::optional<PencilFactor> solvent_factor(const QuadraticPencil& p, double tol) {
  const Eigen::Index n = p.b0.rows();
  Eigen::SelfAdjointEigenSolver<Mat> eb2(hermitize(p.b2));
  const double b2max = eb2.eigenvalues().cwiseAbs().maxCoeff();
  if (eb2.eigenvalues().minCoeff() <= 1e-8 * std::max(1.0, b2max))
    return std::nullopt;

  Eigen::PartialPivLU<Mat> lu(hermitize(p.b2));
  Mat comp = Mat::Zero(2 * n, 2 * n);
  comp.block(0, n, n, n) = Mat::Identity(n, n);
  comp.block(n, 0, n, n) = -lu.solve(hermitize(p.b0));
  comp.block(n, n, n, n) = -lu.solve(p.b1);

  Eigen::ComplexEigenSolver<Mat> es(comp);
  if (es.info() != Eigen::Success) return std::nullopt;
  std::vector<Eigen::Index> lower;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const cx lam = es.eigenvalues()(i);
    if (lam.imag() < -1e-10 * (1.0 + std::abs(lam))) lower.push_back(i);
  }
  if (Eigen::Index(lower.size()) != n) return std::nullopt;

  Mat w1(n, n), w2(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    w1.col(k) = es.eigenvectors().col(lower[k]).head(n);
    w2.col(k) = es.eigenvectors().col(lower[k]).tail(n);
  }
  Eigen::PartialPivLU<Mat> luw(w1.adjoint().eval());
  if (std::abs(luw.determinant()) < 1e-12) return std::nullopt;
  Mat x = luw.solve(w2.adjoint().eval()).adjoint();  // X = W2 W1^{-1}

  PencilFactor pf;
  pf.v1 = eb2.operatorSqrt();
  pf.v0 = -pf.v1 * x;
  pf.res_b0 = (pf.v0.adjoint() * pf.v0 - p.b0).norm();
  pf.res_b1 = (pf.v0.adjoint() * pf.v1 + pf.v1.adjoint() * pf.v0 - p.b1).norm();
  pf.res_b2 = (pf.v1.adjoint() * pf.v1 - p.b2).norm();
  const double scale = 1.0 + p.b0.norm() + p.b1.norm() + p.b2.norm();
  if (pf.max_residual() > 1e3 * tol * scale) return std::nullopt;
  return pf;
}

// Drop rows whose norm is below 1e-12 * max row norm.
Mat trim_rows(const Mat& f) {
  Eigen::VectorXd rn = f.rowwise().norm();
  const double cutoff = 1e-12 * std::max(rn.maxCoeff(), 1.0);
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    if (rn(i) > cutoff) ++kept;
  if (kept == 0) kept = 1;  // keep a zero row so shapes stay sane
  Mat out(kept, f.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < f.rows() && r < kept; ++i)
    if (rn(i) > cutoff || (r == 0 && i + 1 == f.rows())) out.row(r++) = f.row(i);
  if (r < kept) out.conservativeResize(r, Eigen::NoChange);
  return out;
}

}  // namespace

FejerRieszResult fejer_riesz(const QuadraticPencil& p, double tol) {
  FejerRieszResult out;
  // Cheap negativity check first: a scan witness refutes factorability
  // outright and skips the iterative certificate search.
  ScanResult scan = scan_margin(p, tol);
  out.scan_margin = scan.margin;
  out.witness_s = scan.witness_s;
  if (scan.margin < -tol) {
    out.status = FactorStatus::refused_not_psd;
    std::ostringstream os;
    os << "pencil is not positive semidefinite: lambda_min(Q(" << scan.witness_s
       << ")) = " << scan.margin;
    out.detail = os.str();
    return out;
  }

  if (auto pf = solvent_factor(p, tol)) {
    out.factor = *pf;
    out.status = FactorStatus::ok;
    std::ostringstream os;
    os << "factored through the stable solvent, max block residual "
       << pf->max_residual();
    out.detail = os.str();
    return out;
  }

  GramResult gram = gram_search(p, tol);
  if (!gram.converged) {
    out.status = FactorStatus::indeterminate;
    std::ostringstream os;
    os << "certificate search did not converge (gap " << gram.gap << " after "
       << gram.iterations << " iterations, scan margin " << scan.margin << ")";
    out.detail = os.str();
    return out;
  }

  auto root = psd_sqrt(*gram.certificate, tol, 1.25 * gram.gap);
  if (!root) {
    out.status = FactorStatus::indeterminate;
    out.detail = "certificate lost positivity during factoring";
    return out;
  }
  const Eigen::Index n = p.b0.rows();
  Mat f = trim_rows(*root);
  PencilFactor pf;
  pf.v0 = f.leftCols(n);
  pf.v1 = f.rightCols(n);
  pf.res_b0 = (pf.v0.adjoint() * pf.v0 - p.b0).norm();
  pf.res_b1 = (pf.v0.adjoint() * pf.v1 + pf.v1.adjoint() * pf.v0 - p.b1).norm();
  pf.res_b2 = (pf.v1.adjoint() * pf.v1 - p.b2).norm();
  out.factor = pf;
  out.status = FactorStatus::ok;
  std::ostringstream os;
  os << "factored with " << f.rows() << " rows, max block residual "
     << pf.max_residual();
  out.detail = os.str();
  return out;
}

CpWitness gram_to_cp_witness(const QuadraticPencil& p, const Mat& x0, const Mat& x1,
                             const Mat& x2, double tol) {
  const Eigen::Index m = x0.rows();
  if (x0.cols() != m || x1.rows() != m || x1.cols() != m || x2.rows() != m ||
      x2.cols() != m)
    throw std::invalid_argument("coefficient matrices must be square and same size");
  auto herm_defect = [](const Mat& x) {
    return (x - x.adjoint()).norm() / std::max(1.0, x.norm());
  };
  if (herm_defect(x0) > tol || herm_defect(x1) > tol || herm_defect(x2) > tol)
    throw std::invalid_argument("coefficient matrices must be Hermitian");

  Mat xx(2 * m, 2 * m);
  xx << x0, x1, x1, x2;
  if (lambda_min(xx) < -tol * std::max(1.0, opnorm(xx))) {
    std::ostringstream os;
    os << "block matrix [[X0, X1],[X1, X2]] is not PSD: lambda_min = "
       << lambda_min(xx);
    throw std::domain_error(os.str());
  }

  FejerRieszResult fr = fejer_riesz(p, tol);
  if (fr.status != FactorStatus::ok)
    throw std::domain_error("pencil does not admit a factorization: " + fr.detail);

  auto yroot = psd_sqrt(xx, tol);
  if (!yroot) throw std::domain_error("block coefficient matrix lost positivity");
  Mat y0 = yroot->leftCols(m);
  Mat y1 = yroot->rightCols(m);

  CpWitness w;
  w.square_root = Eigen::kroneckerProduct(y0, fr.factor->v0).eval() +
                  Eigen::kroneckerProduct(y1, fr.factor->v1).eval();
  w.value = w.square_root.adjoint() * w.square_root;
  Mat target = Eigen::kroneckerProduct(x0, p.b0).eval() +
               Eigen::kroneckerProduct(x1, p.b1).eval() +
               Eigen::kroneckerProduct(x2, p.b2).eval();
  w.match_residual = (w.value - target).norm();
  return w;
}

}  // namespace iso3
