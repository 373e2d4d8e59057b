#include "iso3/lift.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "iso3/fixtures.hpp"
#include "iso3/hereditary.hpp"

namespace iso3 {

namespace {

Mat coupling(Eigen::Index d, double c) {
  Mat cmat = Mat::Identity(2 * d, 2 * d);
  cmat.block(0, d, d, d) = c * Mat::Identity(d, d);
  return cmat;
}

double objective(const Mat& v, const Mat& t, const Mat& j) {
  return (v * t - j * v).norm();
}

// Exact minimizer over U of |V T - diag(U,U) C V|: unitary Procrustes on the
// block-trace contraction of (VT)(CV)*.
Mat u_step(const Mat& v, const Mat& t, const Mat& cmat) {
  const Eigen::Index d = v.rows() / 2;
  Mat z = (v * t) * (cmat * v).adjoint();
  Mat m = z.block(0, 0, d, d) + z.block(d, d, d, d);
  return polar_unitary(m);
}

Mat polar_isometry(const Mat& x) {
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

struct RestartResult {
  Mat u, v;
  double obj = 0.0;
  std::vector<double> trace;
};

// Joint damped Gauss-Newton polish over (U, V) in polar-retraction
// coordinates. The two-block alternation crawls once it reaches the flat
// valley around a solution family (the gauge freedom in the pair makes the
// cross-coupling degenerate there, and coordinate sweeps advance only
// O(1/k)); a joint step sees the full curvature and converges quadratically
// to machine level. Jacobian by central differences: the problem sizes this
// runs at make that cheaper than assembling the analytic tangent maps.
void polish(const Mat& t, double c, Mat& u, Mat& v, double& obj,
            std::vector<double>& trace) {
  const Eigen::Index d = u.rows();
  const Eigen::Index n = t.cols();
  const Eigen::Index pu = 2 * d * d;
  const Eigen::Index p = pu + 2 * (2 * d) * n;
  const Eigen::Index m = 2 * (2 * d) * n;
  if (p > 900) return;

  auto unpack = [&](const Eigen::VectorXd& xi, Mat& uo, Mat& vo) {
    Mat du(d, d), dv(2 * d, n);
    for (Eigen::Index k = 0; k < d * d; ++k)
      du(k % d, k / d) = cx(xi(2 * k), xi(2 * k + 1));
    for (Eigen::Index k = 0; k < 2 * d * n; ++k)
      dv(k % (2 * d), k / (2 * d)) = cx(xi(pu + 2 * k), xi(pu + 2 * k + 1));
    uo = polar_unitary(u + du);
    vo = polar_isometry(v + dv);
  };
  auto resid = [&](const Mat& uo, const Mat& vo, Eigen::VectorXd& r) {
    const Mat rr = vo * t - assemble(JordanModel{OperatorMatrix(uo), c}) * vo;
    for (Eigen::Index k = 0; k < 2 * d * n; ++k) {
      r(2 * k) = rr(k % (2 * d), k / (2 * d)).real();
      r(2 * k + 1) = rr(k % (2 * d), k / (2 * d)).imag();
    }
  };

  const double floor_abs = 1e-14 * std::max(1.0, t.norm());
  const double h = 1e-6;
  double lam = 1e-3;
  Eigen::VectorXd r0(m), rp(m), rm(m);
  Mat ut, vt;
  for (int it = 0; it < 40 && obj > floor_abs; ++it) {
    resid(u, v, r0);
    Eigen::MatrixXd jac(m, p);
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      xi(k) = h;
      unpack(xi, ut, vt);
      resid(ut, vt, rp);
      xi(k) = -h;
      unpack(xi, ut, vt);
      resid(ut, vt, rm);
      xi(k) = 0.0;
      jac.col(k) = (rp - rm) / (2 * h);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r0;
    bool moved = false;
    for (int tr = 0; tr < 12; ++tr) {
      Eigen::MatrixXd lhs = jtj + lam * Eigen::MatrixXd::Identity(p, p);
      Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
      unpack(step, ut, vt);
      const double o =
          objective(vt, t, assemble(JordanModel{OperatorMatrix(ut), c}));
      if (o < obj) {
        u = ut;
        v = vt;
        obj = o;
        trace.push_back(o);
        lam = std::max(lam / 3.0, 1e-12);
        moved = true;
        break;
      }
      lam *= 4.0;
    }
    if (!moved) break;
  }
}

RestartResult run_restart(const Mat& t, double c, Eigen::Index d, const Mat& u0,
                          Rng& rng, int sweeps, double target_abs) {
  const Eigen::Index n = t.cols();
  Mat ikron_t = Eigen::kroneckerProduct(t.transpose(), Mat::Identity(2 * d, 2 * d));
  Mat cmat = coupling(d, c);

  RestartResult st;
  st.u = u0;
  st.v = random_isometry(2 * d, n, rng);
  Mat j = assemble(JordanModel{OperatorMatrix(st.u), c});
  st.obj = objective(st.v, t, j);

  int flat = 0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    // V step: proximal shrink toward the intertwiner space of the current J,
    // applied through the singular system of the Sylvester operator so the
    // filter mu/(s^2+mu) is evaluated exactly per direction (normal-equation
    // solves go singular exactly when the step matters most), then retraction
    // back to the isometry manifold through the polar factor.
    Mat a = ikron_t - Eigen::kroneckerProduct(Mat::Identity(n, n), j);
    Eigen::BDCSVD<Mat> asvd(a, Eigen::ComputeThinV);
    Vec vcur = Eigen::Map<Vec>(st.v.data(), 2 * d * n);
    Vec coeff = asvd.matrixV().adjoint() * vcur;
    double mu = std::clamp(st.obj * st.obj, 1e-24, 0.3);
    Mat v_best = st.v;
    double obj_best = st.obj;
    for (int bt = 0; bt < 7; ++bt) {
      Vec w = coeff;
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double s2 = asvd.singularValues()(i) * asvd.singularValues()(i);
        w(i) *= mu / (s2 + mu);
      }
      Vec full = asvd.matrixV() * w;
      Mat vtry = polar_isometry(Eigen::Map<Mat>(full.data(), 2 * d, n));
      double o = objective(vtry, t, j);
      if (o <= obj_best + 1e-12) {
        v_best = vtry;
        obj_best = o;
        break;
      }
      mu *= 20.0;
    }
    st.v = v_best;

    st.u = u_step(st.v, t, cmat);
    j = assemble(JordanModel{OperatorMatrix(st.u), c});
    double o = objective(st.v, t, j);
    if (o > st.obj - 1e-14 * std::max(1.0, st.obj))
      ++flat;
    else
      flat = 0;
    st.obj = o;
    st.trace.push_back(o);
    if (o < target_abs || flat >= 8) break;
  }
  if (st.obj < 0.1 * std::max(1.0, t.norm()))
    polish(t, c, st.u, st.v, st.obj, st.trace);
  return st;
}

}  // namespace

LiftingCertificate fit_lifting(const OperatorMatrix& t, double c, FitOptions opts) {
  if (c <= 0) throw std::invalid_argument("growth parameter c must be positive");
  const Eigen::Index n = t.dim();
  if (!opts.allow_nonmember) {
    ScanResult sc = scan_margin(q_pencil(t, c), 1e-10);
    if (sc.margin < -1e-8) {
      std::ostringstream os;
      os << "membership pencil goes negative for c = " << c << ": lambda_min(Q("
         << sc.witness_s << ")) = " << sc.margin
         << "; set allow_nonmember to fit anyway";
      throw std::domain_error(os.str());
    }
  }

  const double scale = std::max(1.0, opnorm(t.a));
  const double target_abs = opts.target * scale;
  Rng rng(opts.seed);

  // Phases of the spectrum of T seed the first restart; a correct model
  // unitary must cover them.
  Eigen::ComplexEigenSolver<Mat> es(t.a);
  Vec phases = es.eigenvalues();
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    double m = std::abs(phases(i));
    phases(i) = m > 1e-12 ? phases(i) / m : cx(1, 0);
  }

  LiftingCertificate best;
  best.residual = std::numeric_limits<double>::infinity();

  Eigen::Index d = opts.d > 0 ? opts.d : n;
  const Eigen::Index d_cap = opts.d > 0 ? opts.d : 3 * n;
  while (true) {
    for (int r = 0; r < opts.restarts; ++r) {
      Mat u0;
      if (r == 0) {
        Vec diag(d);
        for (Eigen::Index i = 0; i < d; ++i)
          diag(i) = i < n ? phases(i)
                          : std::polar(1.0, 2 * M_PI * rng.unif());
        u0 = diag.asDiagonal();
      } else {
        u0 = haar_unitary(d, rng);
      }
      RestartResult rr = run_restart(t.a, c, d, u0, rng, opts.sweeps, target_abs);
      if (rr.obj < best.residual) {
        best.model = JordanModel{OperatorMatrix(rr.u), c};
        best.v = rr.v;
        best.residual = rr.obj;
        best.objective_trace = rr.trace;
      }
      best.restarts_used += 1;
      if (best.residual < target_abs) break;
    }
    if (best.residual < 1e-6 * scale || d >= d_cap) break;
    d = std::min(d + n, d_cap);
  }
  best.isometry_defect =
      (best.v.adjoint() * best.v - Mat::Identity(n, n)).norm();
  return best;
}

LiftReport verify_lifting(const OperatorMatrix& t, const LiftingCertificate& cert) {
  LiftReport rep;
  const Mat j = assemble(cert.model);
  const Eigen::Index n = t.dim();
  rep.isometry_defect =
      (cert.v.adjoint() * cert.v - Mat::Identity(n, n)).norm();

  Mat tinv;
  try {
    tinv = matpow(t.a, -1);
  } catch (const std::domain_error&) {
    rep.t_invertible = false;
  }
  for (int k : {-2, -1, 1, 2, 3}) {
    if (k < 0 && !rep.t_invertible) continue;
    rep.power_residuals.emplace_back(
        k, (cert.v * matpow(t.a, k) - matpow(j, k) * cert.v).norm());
  }

  Eigen::ComplexEigenSolver<Mat> et(t.a), eu(cert.model.u.a);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < et.eigenvalues().size(); ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < eu.eigenvalues().size(); ++k)
      dmin = std::min(dmin, std::abs(et.eigenvalues()(i) - eu.eigenvalues()(k)));
    gap = std::max(gap, dmin);
  }
  rep.spectral_gap = gap;
  std::ostringstream os;
  os << "extension residual " << cert.residual << ", isometry defect "
     << rep.isometry_defect << ", spectral gap " << gap
     << (rep.t_invertible ? "" : ", T not invertible");
  rep.detail = os.str();
  return rep;
}

TrimResult trim_spectrum(const OperatorMatrix& t, const LiftingCertificate& cert,
                         TrimOptions opts) {
  TrimResult out;
  const Eigen::Index d = cert.model.block_dim();
  const Eigen::Index n = t.dim();
  const double scale = std::max(1.0, opnorm(t.a));
  if (cert.residual > opts.residual_threshold * scale) {
    std::ostringstream os;
    os << "certificate residual " << cert.residual
       << " exceeds the trim threshold " << opts.residual_threshold * scale;
    out.reason = os.str();
    return out;
  }

  // The model unitary is normal, so its Schur form is diagonal and the Schur
  // basis is an orthonormal eigenbasis.
  Eigen::ComplexSchur<Mat> schur(cert.model.u.a);
  Mat q = schur.matrixU();
  Vec mu = schur.matrixT().diagonal();
  Eigen::ComplexEigenSolver<Mat> et(t.a);
  const Vec lam = et.eigenvalues();

  const double vnorm = cert.v.norm();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < d; ++k) {
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      dist = std::min(dist, std::abs(mu(k) - lam(i)));
    if (dist <= opts.delta) {
      keep.push_back(k);
      continue;
    }
    double mass = std::max((q.col(k).adjoint() * cert.v.topRows(d)).norm(),
                           (q.col(k).adjoint() * cert.v.bottomRows(d)).norm());
    if (mass > opts.eps_rel * vnorm) {
      std::ostringstream os;
      os << "eigenvalue " << fmt_cx(mu(k))
         << " of the model unitary lies at distance " << dist
         << " from the spectrum of T yet carries embedding mass " << mass
         << "; refusing to delete it";
      out.reason = os.str();
      return out;
    }
    out.deleted.emplace_back(mu(k), mass);
  }
  if (keep.empty()) {
    out.reason = "no model eigenvalue lies near the spectrum of T";
    return out;
  }

  const Eigen::Index r = Eigen::Index(keep.size());
  Mat e(d, r);
  for (Eigen::Index i = 0; i < r; ++i) e.col(i) = q.col(keep[i]);
  Mat w = polar_unitary(e.adjoint() * cert.model.u.a * e);
  Mat v2(2 * r, n);
  v2.topRows(r) = e.adjoint() * cert.v.topRows(d);
  v2.bottomRows(r) = e.adjoint() * cert.v.bottomRows(d);

  out.cert.model = JordanModel{OperatorMatrix(w), cert.model.c};
  out.cert.v = v2;
  out.cert.residual = (v2 * t.a - assemble(out.cert.model) * v2).norm();
  out.cert.isometry_defect =
      (v2.adjoint() * v2 - Mat::Identity(n, n)).norm();
  out.ok = true;
  std::ostringstream os;
  os << "deleted " << out.deleted.size() << " spectral directions, kept " << r
     << "; residual " << out.cert.residual;
  out.reason = os.str();
  return out;
}

}  // namespace iso3
