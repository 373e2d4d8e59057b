#include "iso3/hereditary.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iso3 {

namespace {

Mat id_like(const OperatorMatrix& t) { return Mat::Identity(t.dim(), t.dim()); }

struct Powers {
  Mat tt;    // T*T
  Mat t2t2;  // T*^2 T^2
};

Powers gram_powers(const Mat& a) {
  const Mat a2 = a * a;
  return {a.adjoint() * a, a2.adjoint() * a2};
}

}  // namespace

Mat defect3(const OperatorMatrix& t) {
  const Mat a = t.a;
  const Mat a2 = a * a;
  const Mat a3 = a2 * a;
  const Mat I = id_like(t);
  return a3.adjoint() * a3 - 3.0 * (a2.adjoint() * a2) + 3.0 * (a.adjoint() * a) - I;
}

bool is_3_isometry(const OperatorMatrix& t) {
  const double scale = std::pow(1.0 + opnorm(t.a), 6);
  return opnorm(defect3(t)) <= t.tol * scale;
}

Mat b_two(const OperatorMatrix& t) {
  const auto p = gram_powers(t.a);
  return 0.5 * (p.t2t2 - 2.0 * p.tt + id_like(t));
}

Mat b_one(const OperatorMatrix& t) {
  const auto p = gram_powers(t.a);
  return 0.5 * (-p.t2t2 + 4.0 * p.tt - 3.0 * id_like(t));
}

Mat b_zero(const OperatorMatrix& t, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("b_zero: c must be positive");
  return id_like(t) - b_two(t) / (c * c);
}

Mat q_plus(const OperatorMatrix& t, double s) {
  return id_like(t) + s * b_one(t) + (s * s) * b_two(t);
}

QuadraticPencil q_pencil(const OperatorMatrix& t, double c) {
  QuadraticPencil p;
  p.b0 = b_zero(t, c);
  p.b1 = b_one(t);
  p.b2 = b_two(t);
  p.c = c;
  return p;
}

Mat q_eval(const QuadraticPencil& p, double s) { return p.b0 + s * p.b1 + (s * s) * p.b2; }

namespace {

// Smallest eigenvalue of Q(s).  Values whose magnitude sits below the
// floating-point resolution of the pencil at that s are reported as zero:
// the coefficients carry absolute round-off eps*scale, the evaluation
// amplifies it by 1 + |s| + s^2, and an eigenvalue that is exactly zero in
// exact arithmetic comes back from the solver anywhere inside that band.
// Without the clip, the huge tail brackets used when b2 is singular would
// turn coefficient noise into spurious violations.
double pencil_lmin(const QuadraticPencil& p, double s) {
  const double lam = lambda_min(q_eval(p, s));
  const double scale = std::max({1.0, p.b0.norm(), p.b1.norm(), p.b2.norm()});
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       (1.0 + std::abs(s) + s * s) * scale;
  return std::abs(lam) <= floor ? 0.0 : lam;
}

// golden-section refinement of lambda_min(Q(s)) on [lo, hi]
double golden_refine(const QuadraticPencil& p, double lo, double hi, double* best_s) {
  constexpr double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = pencil_lmin(p, x1), f2 = pencil_lmin(p, x2);
  for (int it = 0; it < 48; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = pencil_lmin(p, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = pencil_lmin(p, x2);
    }
  }
  if (f1 <= f2) {
    *best_s = x1;
    return f1;
  }
  *best_s = x2;
  return f2;
}

}  // namespace

ScanResult scan_margin(const QuadraticPencil& p, double tol) {
  const double c_eff = std::max(p.c, 1.0);
  const double lam_plus = std::max(lambda_min(p.b2), tol);
  const double S = std::max(8.0, 4.0 * (1.0 + c_eff) * (1.0 + c_eff) / lam_plus);

  std::vector<double> grid;
  for (int i = 0; i <= 160; ++i) grid.push_back(-8.0 + 0.1 * i);
  if (S > 8.0) {
    const double ratio = std::pow(S / 8.0, 1.0 / 48.0);
    double x = 8.0;
    for (int i = 0; i < 48; ++i) {
      x *= ratio;
      grid.push_back(x);
      grid.push_back(-x);
    }
    std::sort(grid.begin(), grid.end());
  }

  std::vector<double> val(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) val[i] = pencil_lmin(p, grid[i]);

  // refine around every interior local minimum plus the global grid best
  size_t gbest = std::min_element(val.begin(), val.end()) - val.begin();
  std::vector<size_t> seeds{gbest};
  for (size_t i = 1; i + 1 < grid.size(); ++i)
    if (val[i] <= val[i - 1] && val[i] <= val[i + 1]) seeds.push_back(i);
  std::sort(seeds.begin(), seeds.end(), [&](size_t a, size_t b) { return val[a] < val[b]; });
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  if (seeds.size() > 6) seeds.resize(6);

  ScanResult r;
  r.bracket = S;
  r.margin = val[gbest];
  r.witness_s = grid[gbest];
  for (size_t idx : seeds) {
    const double lo = grid[idx == 0 ? 0 : idx - 1];
    const double hi = grid[std::min(idx + 1, grid.size() - 1)];
    double s = 0.0;
    const double m = golden_refine(p, lo, hi, &s);
    if (m < r.margin) {
      r.margin = m;
      r.witness_s = s;
    }
  }
  return r;
}

namespace {

Mat proj_affine_gram(const Mat& g, const QuadraticPencil& p) {
  const Eigen::Index n = p.b0.rows();
  Mat out(2 * n, 2 * n);
  const Mat c = g.block(0, n, n, n);
  const Mat c_new = 0.5 * p.b1 + 0.5 * (c - c.adjoint());
  out.block(0, 0, n, n) = p.b0;
  out.block(n, n, n, n) = p.b2;
  out.block(0, n, n, n) = c_new;
  out.block(n, 0, n, n) = c_new.adjoint();
  return out;
}

Mat proj_psd_cone(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(g));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

GramResult gram_search(const QuadraticPencil& p, double tol, int max_iter) {
  const Eigen::Index n = p.b0.rows();
  Mat seed(2 * n, 2 * n);
  seed.block(0, 0, n, n) = p.b0;
  seed.block(n, n, n, n) = p.b2;
  seed.block(0, n, n, n) = 0.5 * p.b1;
  seed.block(n, 0, n, n) = 0.5 * p.b1.adjoint();
  const double scale = std::max(1.0, seed.norm());

  Mat x = seed;
  Mat corr = Mat::Zero(2 * n, 2 * n);
  GramResult res;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const Mat y = proj_psd_cone(x + corr);
    corr = x + corr - y;
    x = proj_affine_gram(y, p);
    const double gap = (y - x).norm();
    res.iterations = it;
    res.gap = gap;
    if (gap <= tol * scale) {
      res.converged = true;
      res.certificate = x;
      return res;
    }
    // stall detection: clearly infeasible pencils plateau at a positive gap
    if (it % 64 == 0) {
      if (gap > 1e4 * tol * scale && gap > 0.999 * prev_gap) break;
      prev_gap = gap;
    }
  }
  return res;
}

FcReport fc_margin(const OperatorMatrix& t, double c, FcMethod method) {
  const QuadraticPencil p = q_pencil(t, c);
  const double tol = t.tol;
  const ScanResult sc = scan_margin(p, tol);

  FcReport rep;
  rep.c = c;
  rep.margin = sc.margin;
  rep.witness_s = sc.witness_s;

  if (method == FcMethod::scan) {
    rep.method = "scan";
    rep.status = sc.margin >= -tol ? FcStatus::member : FcStatus::nonmember;
    return rep;
  }

  const GramResult gr = gram_search(p, tol);
  if (gr.certificate) rep.certificate = gr.certificate;

  if (method == FcMethod::gram) {
    rep.method = "gram";
    if (gr.converged) {
      rep.status = FcStatus::member;
    } else {
      rep.status = FcStatus::boundary;
      rep.detail = "gram search did not converge (gap " + std::to_string(gr.gap) +
                   " after " + std::to_string(gr.iterations) + " iterations)";
    }
    return rep;
  }

  rep.method = "both";
  if (gr.converged && sc.margin >= -tol) {
    rep.status = FcStatus::member;
  } else if (!gr.converged && sc.margin < -10.0 * tol) {
    rep.status = FcStatus::nonmember;
  } else if (!gr.converged) {
    rep.status = FcStatus::boundary;
    rep.detail = "gram search did not converge and scan margin " + std::to_string(sc.margin) +
                 " is within 10*tol of zero: boundary case";
  } else {
    rep.status = FcStatus::boundary;
    rep.detail = "certifier disagreement: gram converged but scan margin is " +
                 std::to_string(sc.margin);
  }
  return rep;
}

std::optional<double> minimal_c(const OperatorMatrix& t) {
  if (!is_3_isometry(t))
    throw std::domain_error("minimal_c: input is not a 3-isometry within tolerance");
  const double lo_cap = 1e-4, hi_cap = 1e3;
  auto member = [&](double c) {
    return scan_margin(q_pencil(t, c), t.tol).margin >= -t.tol;
  };
  if (member(lo_cap)) return lo_cap;
  if (!member(hi_cap)) return std::nullopt;
  double lo = lo_cap, hi = hi_cap;
  for (int it = 0; it < 60 && (hi - lo) > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (member(mid) ? hi : lo) = mid;
  }
  return hi;
}

OmnibusReport check_omnibus(const OperatorMatrix& t, double c, const std::vector<double>& s_grid) {
  OmnibusReport r;
  const Mat B1 = b_one(t), B2 = b_two(t);
  const double tnorm = opnorm(t.a);
  r.slack_b2 = c * c - opnorm(B2);
  r.slack_b1 = 2.0 * c - opnorm(B1);
  r.slack_norm = 1.0 + c - tnorm;

  const QuadraticPencil p = q_pencil(t, c);
  const Mat I = Mat::Identity(t.dim(), t.dim());
  auto qp = [&](double s) { return I + s * B1 + s * s * B2; };
  double worst = std::numeric_limits<double>::infinity();
  double smax = 1.0;
  for (double s : s_grid) {
    smax = std::max(smax, std::abs(s) + 1.0);
    for (double d : {+1.0, -1.0})
      worst = std::min(worst, lambda_min(2.0 * (1.0 + c * c) * qp(s) - qp(s + d)));
  }
  r.slack_convex = worst;

  const double slack_tol =
      t.tol * std::max(1.0, (1.0 + c) * (1.0 + tnorm) * (1.0 + tnorm) * smax * smax);
  r.ok_b2 = r.slack_b2 >= -slack_tol;
  r.ok_b1 = r.slack_b1 >= -slack_tol;
  r.ok_norm = r.slack_norm >= -slack_tol;
  r.ok_convex = r.slack_convex >= -slack_tol;
  return r;
}

double IntertwineReport::max_residual() const {
  return std::max({shift_residual, b2_residual, b1_residual});
}

IntertwineReport check_intertwining_identities(const OperatorMatrix& t, int n_lo, int n_hi,
                                               int j_max) {
  IntertwineReport r;
  const Mat B1 = b_one(t), B2 = b_two(t);
  const Mat I = Mat::Identity(t.dim(), t.dim());
  auto qp = [&](double s) -> Mat { return I + s * B1 + s * s * B2; };

  for (int j = 1; j <= j_max; ++j) {
    const Mat tj = matpow(t.a, j);
    for (int n = n_lo; n <= n_hi; ++n) {
      const double res = (tj.adjoint() * qp(n) * tj - qp(n + j)).norm();
      r.shift_residual = std::max(r.shift_residual, res);
    }
  }
  r.b2_residual = (t.a.adjoint() * B2 * t.a - B2).norm();
  const Mat t2 = t.a * t.a;
  r.b1_residual = (t.a.adjoint() * B1 * t.a - 0.5 * (t2.adjoint() * t2 - I)).norm();
  return r;
}

GrowthFit fit_quadratic_growth(const OperatorMatrix& t, int n_max) {
  if (n_max < 3) throw std::invalid_argument("fit_quadratic_growth: need n_max >= 3");
  const Eigen::Index d = t.dim();
  const int rows = n_max + 1;
  Mat vander(rows, 3);
  Mat rhs(rows, d * d);
  Mat pw = Mat::Identity(d, d);
  for (int n = 0; n <= n_max; ++n) {
    vander(n, 0) = 1.0;
    vander(n, 1) = double(n);
    vander(n, 2) = double(n) * double(n);
    const Mat gram = pw.adjoint() * pw;
    rhs.row(n) = Eigen::Map<const Vec>(gram.data(), d * d).transpose();
    pw = pw * t.a;
  }
  const Mat coef = vander.colPivHouseholderQr().solve(rhs);  // 3 x d^2

  GrowthFit fit;
  auto unvec = [&](Eigen::Index r) -> Mat {
    Vec v = coef.row(r).transpose();
    return Eigen::Map<const Mat>(v.data(), d, d);
  };
  fit.b0_hat = unvec(0);
  fit.b1_hat = unvec(1);
  fit.b2_hat = unvec(2);
  for (int n = 0; n <= n_max; ++n) {
    const Mat model = fit.b0_hat + double(n) * fit.b1_hat + double(n * n) * fit.b2_hat;
    const Mat gram = matpow(t.a, n).adjoint() * matpow(t.a, n);
    fit.residual = std::max(fit.residual, (gram - model).norm());
  }
  return fit;
}

OperatorMatrix mobius(const OperatorMatrix& t, cx lambda, double cond_cap) {
  const Mat I = Mat::Identity(t.dim(), t.dim());
  const Mat shift = t.a - lambda * I;
  Eigen::JacobiSVD<Mat> svd(shift);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(t.dim() - 1);
  if (smin <= 0.0 || smax / smin > cond_cap)
    throw std::domain_error("mobius: T - lambda is near-singular (cond above cap)");
  const Mat inv = shift.partialPivLu().solve(I);
  return OperatorMatrix((I - std::conj(lambda) * t.a) * inv, t.tol);
}

double norm_bound_check(const OperatorMatrix& t, double c) {
  const double bound = 1.0 + 0.5 * c * c + c * std::sqrt(1.0 + 0.25 * c * c);
  const double n = opnorm(t.a);
  return bound - n * n;
}

}  // namespace iso3
