#include "iso3/gns.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace iso3 {

Mat gns_kernel(const OperatorMatrix& t, int m, int n) {
  if (n <= m) return q_plus(t, n) * matpow(t.a, m - n);
  return matpow(t.a, n - m).adjoint() * q_plus(t, m);
}

namespace {

// Eigenpairs of a Hermitian matrix with eigenvalues above cut kept.
struct Whitened {
  Mat basis;             // columns: kept eigenvectors
  Eigen::VectorXd eigs;  // kept eigenvalues, ascending
};

Whitened keep_above(const Mat& h, double cut) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  const Eigen::VectorXd ev = es.eigenvalues();
  Eigen::Index first = ev.size();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) {
      first = i;
      break;
    }
  Whitened w;
  const Eigen::Index kept = ev.size() - first;
  w.basis = es.eigenvectors().rightCols(kept);
  w.eigs = ev.tail(kept);
  return w;
}

}  // namespace

GnsDilation build_dilation(const OperatorMatrix& t, double c, GnsWindow win) {
  if (win.n_back < 1 || win.n_fwd < 1)
    throw std::invalid_argument("window must extend at least one slot each way");
  if (!is_3_isometry(t)) {
    std::ostringstream os;
    os << "input is not a 3-isometry: cubic defect norm = " << opnorm(defect3(t));
    throw std::domain_error(os.str());
  }
  const int nb = win.n_back, nf = win.n_fwd;
  const int slots = nb + nf + 1;
  const Eigen::Index n = t.dim();

  GnsDilation out;
  out.window = win;

  // Powers T^0 .. T^(slots-1) drive both the Gram and its stack identity.
  std::vector<Mat> pw(slots);
  pw[0] = Mat::Identity(n, n);
  for (int k = 1; k < slots; ++k) pw[k] = pw[k - 1] * t.a;

  out.gram = Mat(slots * n, slots * n);
  for (int i = 0; i < slots; ++i)
    for (int j = 0; j < slots; ++j)
      out.gram.block(i * n, j * n, n, n) = gns_kernel(t, -nb + j, -nb + i);
  out.gram = hermitize(out.gram);

  Mat stack(n, slots * n);
  for (int j = 0; j < slots; ++j) stack.middleCols(j * n, n) = pw[j];
  out.psd_identity_residual =
      (out.gram - stack.adjoint() * q_plus(t, -nb) * stack).norm();

  Eigen::SelfAdjointEigenSolver<Mat> es(out.gram);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double emax = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  out.gram_lambda_min = ev(0);
  if (ev(0) < -1e-9 * emax) {
    std::ostringstream os;
    os << "window Gram is not positive semidefinite: lambda_min = " << ev(0)
       << " against scale " << emax;
    throw std::domain_error(os.str());
  }
  out.rank_tol = 1e-10 * emax;
  Whitened kept = keep_above(out.gram, out.rank_tol);
  out.rank = kept.eigs.size();
  Eigen::VectorXd sq = kept.eigs.cwiseSqrt();
  out.coords = sq.asDiagonal() * kept.basis.adjoint();

  // Classes of vectors supported on the interior slots (all but the last)
  // already span the quotient, and the one-step shift carries them into the
  // window without truncation. Building Y through a right inverse of the
  // interior coordinate map therefore reproduces the quotient action of the
  // shift exactly; a pseudoinverse of the full map would instead shift a
  // representative that leans on the last slot and lose whatever falls off.
  const Eigen::Index int_cols = Eigen::Index(slots - 1) * n;
  const Mat phi_int = out.coords.leftCols(int_cols);
  const Mat phi_shifted = out.coords.rightCols(int_cols);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(phi_int);
  out.y = phi_shifted * cod.pseudoInverse();
  out.v = out.coords.middleCols(nb * n, n);
  out.v_isometry_defect = (out.v.adjoint() * out.v - Mat::Identity(n, n)).norm();

  Mat yk = Mat::Identity(out.rank, out.rank);
  Mat tk = Mat::Identity(n, n);
  for (int k = 1; k <= std::min(nb, nf); ++k) {
    yk = out.y * yk;
    tk = tk * t.a;
    out.intertwine.emplace_back(k, (out.v * tk - yk * out.v).norm());
  }

  // Interior expansivity: Rayleigh range of Y on classes supported away from
  // the last slot, computed as generalized eigenvalues after whitening.
  Mat xin = out.coords.leftCols((slots - 1) * n);
  Mat yx = out.y * xin;
  Mat gx = xin.adjoint() * xin;
  Whitened wx = keep_above(gx, 1e-10 * std::max(lambda_max(gx), 1e-300));
  Mat white = wx.basis * wx.eigs.cwiseSqrt().cwiseInverse().asDiagonal();
  Mat rayleigh = white.adjoint() * (yx.adjoint() * yx) * white;
  Eigen::SelfAdjointEigenSolver<Mat> rs(hermitize(rayleigh));
  out.expansivity_lo = rs.eigenvalues()(0);
  out.expansivity_hi = rs.eigenvalues()(rs.eigenvalues().size() - 1);
  out.expansivity_bound = 2.0 * (1.0 + c * c);
  return out;
}

YMembershipReport verify_y_in_fc(const GnsDilation& d, const OperatorMatrix& t,
                                 double c, double tol) {
  const int a_max = std::min(d.window.n_back, d.window.n_fwd) / 2;
  if (a_max < 3)
    throw std::invalid_argument("window too small: need >= 4 interior powers");
  const Eigen::Index n = t.dim();

  std::vector<Mat> grams;
  Mat yk = Mat::Identity(d.rank, d.rank);
  for (int a = 0; a <= a_max; ++a) {
    if (a > 0) yk = d.y * yk;
    Mat yv = yk * d.v;
    grams.push_back(hermitize(yv.adjoint() * yv));
  }

  // Least squares fit of the power Grams to b0 + a b1 + a^2 b2, entrywise.
  Mat vand(a_max + 1, 3);
  for (int a = 0; a <= a_max; ++a) {
    vand(a, 0) = 1.0;
    vand(a, 1) = a;
    vand(a, 2) = double(a) * a;
  }
  Mat rhs(a_max + 1, n * n);
  for (int a = 0; a <= a_max; ++a) {
    Mat g = grams[a];
    rhs.row(a) = Eigen::Map<Vec>(g.data(), n * n).transpose();
  }
  Mat sol = vand.colPivHouseholderQr().solve(rhs);
  Mat fit_err = vand * sol - rhs;

  auto unvec = [&](Eigen::Index row) {
    Vec v = sol.row(row).transpose();
    return hermitize(Mat(Eigen::Map<Mat>(v.data(), n, n)));
  };
  QuadraticPencil q;
  q.c = c;
  Mat b0 = unvec(0);
  q.b1 = unvec(1);
  q.b2 = unvec(2);
  q.b0 = b0 - q.b2 / (c * c);

  YMembershipReport rep;
  rep.fit_residual = fit_err.norm();
  rep.margin = scan_margin(q, tol).margin;
  rep.ok = rep.margin >= -tol && rep.fit_residual <= 1e-6 * std::max(1.0, b0.norm());
  std::ostringstream os;
  os << "power growth fit residual " << rep.fit_residual << ", pencil margin "
     << rep.margin << " at c = " << c;
  rep.detail = os.str();
  return rep;
}

}  // namespace iso3
