#include "iso3/symmetric3.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "iso3/hereditary.hpp"
#include "iso3/jordan.hpp"

namespace iso3 {

namespace {
const cx kI(0.0, 1.0);

Mat closed_b1(const Mat& a) { return kI * (a - a.adjoint()); }

Mat closed_b2(const Mat& a) {
  return (2.0 * a.adjoint() * a - a.adjoint() * a.adjoint() - a * a) / 2.0;
}
}  // namespace

Mat sym_e(const OperatorMatrix& a, double s) {
  Mat up = (kI * s * a.a).exp();
  return up.adjoint() * up;
}

SymCoefficients sym_coefficients(const OperatorMatrix& a, int samples,
                                 double s_max) {
  if (samples < 5)
    throw std::invalid_argument("need at least 5 sample points to fit E(s)");
  const Eigen::Index n = a.dim();
  Mat vand(samples, 2);
  Mat rhs(samples, n * n);
  for (int k = 0; k < samples; ++k) {
    const double s = -s_max + 2.0 * s_max * k / (samples - 1);
    vand(k, 0) = s;
    vand(k, 1) = s * s;
    Mat e = sym_e(a, s) - Mat::Identity(n, n);
    rhs.row(k) = Eigen::Map<Vec>(e.data(), n * n).transpose();
  }
  Mat sol = vand.colPivHouseholderQr().solve(rhs);

  SymCoefficients out;
  Vec r1 = sol.row(0).transpose();
  Vec r2 = sol.row(1).transpose();
  out.b1 = hermitize(Mat(Eigen::Map<Mat>(r1.data(), n, n)));
  out.b2 = hermitize(Mat(Eigen::Map<Mat>(r2.data(), n, n)));
  out.fit_residual = (vand * sol - rhs).norm();
  out.c_sym = std::sqrt(opnorm(out.b2));
  const double scale = std::max(1.0, opnorm(a.a));
  out.closed_form_gap =
      std::max((out.b1 - closed_b1(a.a)).norm(), (out.b2 - closed_b2(a.a)).norm()) /
      (scale * scale);
  return out;
}

SymCheck check_3_symmetric(const OperatorMatrix& a, double tol) {
  SymCheck out;
  const Eigen::Index n = a.dim();
  const Mat b1 = closed_b1(a.a);
  const Mat b2 = closed_b2(a.a);
  const Mat& m = a.a;
  const Mat ms = m.adjoint();
  out.cubic_defect =
      opnorm(ms * ms * ms - 3.0 * ms * ms * m + 3.0 * ms * m * m - m * m * m);

  double dev = 0.0, scale = 1.0;
  for (int k = 0; k < 21; ++k) {
    const double s = -2.0 + 0.2 * k;
    Mat e = sym_e(a, s);
    scale = std::max(scale, opnorm(e));
    dev = std::max(dev,
                   opnorm(e - Mat::Identity(n, n) - s * b1 - (s * s) * b2));
  }
  out.deviation = dev;
  out.scale = scale;
  out.ok = dev <= tol * scale;
  out.coeffs = sym_coefficients(a);
  std::ostringstream os;
  if (out.ok)
    os << "E(s) is quadratic in s: max deviation " << dev << " against scale "
       << scale;
  else
    os << "E(s) is not quadratic in s: deviation " << dev << " against scale "
       << scale << " (cubic defect " << out.cubic_defect << ")";
  out.detail = os.str();
  return out;
}

double sym_group_defect(const OperatorMatrix& a, const Mat& b1, const Mat& b2) {
  const Eigen::Index n = a.dim();
  auto poly = [&](double x) {
    return Mat(Mat::Identity(n, n) + x * b1 + (x * x) * b2);
  };
  double worst = 0.0;
  for (double s : {-1.3, -0.4, 0.7, 1.9})
    for (double t : {-0.9, 0.3, 1.1}) {
      Mat up = (kI * s * a.a).exp();
      worst = std::max(worst, (poly(s + t) - up.adjoint() * poly(t) * up).norm());
    }
  return worst;
}

SymExistc sym_existc_margins(const OperatorMatrix& a) {
  SymExistc out;
  const Mat b2 = closed_b2(a.a);
  const double nb2 = opnorm(b2);
  out.c_sq_1 = nb2;
  out.c_sq_2 = 2.0 * nb2;
  if (nb2 < 1e-14 * std::max(1.0, opnorm(a.a))) {
    out.trivial = true;
    return out;
  }
  double m1 = std::numeric_limits<double>::infinity();
  double m2 = m1;
  for (int k = 0; k <= 160; ++k) {
    const double s = -6.0 + 12.0 * k / 160.0;
    Mat e = sym_e(a, s);
    m1 = std::min(m1, lambda_min(e - b2 / out.c_sq_1));
    m2 = std::min(m2, lambda_min(e - b2 / out.c_sq_2));
  }
  out.margin_1 = m1;
  out.margin_2 = m2;
  return out;
}

ExpBridge exp_bridge(const OperatorMatrix& a) {
  ExpBridge out;
  const double rho = spectral_radius(a.a);
  out.t0 = rho > 1e-12 ? std::min(1.0, M_PI / (2.0 * rho)) : 1.0;
  out.t = OperatorMatrix((kI * out.t0 * a.a).exp(), a.tol);
  return out;
}

Mat log_bridge(const Mat& w, double theta_lo, double theta_hi, double arc_pad) {
  if (theta_hi < theta_lo) std::swap(theta_lo, theta_hi);
  const double mid = 0.5 * (theta_lo + theta_hi);
  const double half = 0.5 * (theta_hi - theta_lo) + arc_pad;
  if (half >= M_PI)
    throw std::domain_error("arc spans a full half turn; no single branch fits");

  Eigen::ComplexEigenSolver<Mat> es(w);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cx lam = es.eigenvalues()(i);
    if (std::abs(std::abs(lam) - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "eigenvalue " << fmt_cx(lam) << " has modulus " << std::abs(lam)
         << "; input is not unitary";
      throw std::domain_error(os.str());
    }
    const double arg = std::arg(lam * std::polar(1.0, -mid));
    if (std::abs(arg) > half) {
      std::ostringstream os;
      os << "eigenvalue " << fmt_cx(lam) << " falls outside the arc ["
         << theta_lo - arc_pad << ", " << theta_hi + arc_pad << "]";
      throw std::domain_error(os.str());
    }
  }

  Mat rotated = std::polar(1.0, -mid) * w;
  Mat a = -kI * rotated.log() +
          mid * Mat::Identity(w.rows(), w.cols());
  const double round_trip = ((kI * a).exp() - w).norm();
  if (round_trip > 1e-9 * std::max(1.0, w.norm())) {
    std::ostringstream os;
    os << "logarithm round trip failed: |exp(i log) - W| = " << round_trip;
    throw std::domain_error(os.str());
  }
  return a;
}

SymLifting sym_lifting(const OperatorMatrix& a, FitOptions fopts) {
  SymLifting out;
  const Eigen::Index n = a.dim();
  const double scale = std::max(1.0, opnorm(a.a));

  SymCheck chk = check_3_symmetric(a);
  if (!chk.ok) {
    out.status = SymStatus::refused;
    out.detail = "input is not 3-symmetric: " + chk.detail;
    return out;
  }
  out.existc = sym_existc_margins(a);

  if ((a.a - a.a.adjoint()).norm() <= 1e-12 * scale || out.existc.trivial) {
    out.status = SymStatus::selfadjoint_trivial;
    out.c_sym = 0.0;
    out.a_model = hermitize(a.a);
    out.j_sym = out.a_model;
    out.cert.v = Mat::Identity(n, n);
    out.cert.model = JordanModel{OperatorMatrix(Mat::Identity(1, 1)), 1.0};
    out.residual = 0.0;
    out.detail = "selfadjoint input extends itself; nothing to build";
    return out;
  }

  out.c_sym = chk.coeffs.c_sym;
  ExpBridge br = exp_bridge(a);
  out.t0 = br.t0;
  out.t_exp = br.t;
  const double c_t = br.t0 * out.c_sym;

  out.cert = fit_lifting(br.t, c_t, fopts);
  TrimResult tr = trim_spectrum(br.t, out.cert);
  std::string trim_note;
  if (tr.ok)
    out.cert = tr.cert;
  else
    trim_note = " (spectral trim skipped: " + tr.reason + ")";

  // The spectrum of a 3-symmetric operator is real, so the exponentials live
  // on the arc t0 * [min eig, max eig] and a single branch of log recovers
  // the Hermitian block.
  Eigen::ComplexEigenSolver<Mat> es(a.a);
  double lo = es.eigenvalues().real().minCoeff();
  double hi = es.eigenvalues().real().maxCoeff();
  Mat a_hat = log_bridge(out.cert.model.u.a, br.t0 * lo, br.t0 * hi,
                         1e-3 + 0.01 * br.t0 * (hi - lo));
  out.a_model = hermitize(a_hat) / br.t0;
  out.j_sym = build_symmetric_jordan(OperatorMatrix(out.a_model), out.c_sym);
  out.residual = (out.cert.v * a.a - out.j_sym * out.cert.v).norm();
  out.status = SymStatus::ok;
  std::ostringstream os;
  os << "extension residual " << out.residual << " with model block "
     << out.a_model.rows() << "x" << out.a_model.cols() << ", t0 = " << br.t0
     << trim_note;
  out.detail = os.str();
  return out;
}

}  // namespace iso3
