#include "iso3/jordan.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "iso3/hereditary.hpp"

namespace iso3 {

Mat assemble(const JordanModel& m) {
  const Eigen::Index d = m.block_dim();
  Mat j = Mat::Zero(2 * d, 2 * d);
  j.block(0, 0, d, d) = m.u.a;
  j.block(0, d, d, d) = m.c * m.u.a;
  j.block(d, d, d, d) = m.u.a;
  return j;
}

JordanModel build_jordan(const OperatorMatrix& u, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("build_jordan: c must be positive");
  if (!is_unitary(u)) throw std::invalid_argument("build_jordan: u is not unitary within tol");
  return JordanModel{u, c};
}

Mat build_symmetric_jordan(const OperatorMatrix& a, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("build_symmetric_jordan: c must be positive");
  if (!is_hermitian(a))
    throw std::invalid_argument("build_symmetric_jordan: a is not Hermitian within tol");
  const Eigen::Index d = a.dim();
  Mat j = Mat::Zero(2 * d, 2 * d);
  j.block(0, 0, d, d) = a.a;
  j.block(0, d, d, d) = cx(0.0, -c) * Mat::Identity(d, d);
  j.block(d, d, d, d) = a.a;
  return j;
}

JordanRecognition recognize_jordan(const OperatorMatrix& j, double c) {
  JordanRecognition rec;
  const Eigen::Index dim = j.dim();
  const double jn = opnorm(j.a);
  const double scale = std::pow(1.0 + jn, 4);
  const double eta = j.tol * scale;

  if (dim % 2 != 0) {
    rec.reason = "dimension is odd; N*N and NN* cannot be complementary projections";
    return rec;
  }
  const Eigen::Index d = dim / 2;

  // N*N is recovered as b2/c^2; it must be an orthogonal projection of rank d
  const Mat p = b_two(j) / (c * c);
  if ((p - p.adjoint()).norm() > eta || (p * p - p).norm() > eta) {
    rec.reason = "b2/c^2 is not an orthogonal projection (J is not unitary + c*nilpotent)";
    return rec;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(p));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > 0.5) ++rank;
    if (ev > 0.1 && ev < 0.9) {
      rec.reason = "b2/c^2 has an eigenvalue far from {0,1}; not a projection";
      return rec;
    }
  }
  if (rank != d) {
    rec.reason = "rank(N*N) != dim/2; nilpotent ranges are not complementary halves";
    return rec;
  }

  // eigenvalues ascend, so the kernel of p comes first
  const Mat e0 = es.eigenvectors().leftCols(d);   // ran(NN*) = ker(N)
  const Mat e1 = es.eigenvectors().rightCols(d);  // ran(N*N)

  const Mat w0 = e0.adjoint() * j.a * e0;
  const Mat w1 = e1.adjoint() * j.a * e1;
  const Mat ncpl = (e0.adjoint() * j.a * e1) / c;
  const Mat lower = e1.adjoint() * j.a * e0;

  if (lower.norm() > eta) {
    rec.reason = "J does not leave ran(NN*) invariant (nonzero lower coupling block)";
    return rec;
  }
  const Mat idd = Mat::Identity(d, d);
  if ((ncpl.adjoint() * ncpl - idd).norm() > eta) {
    rec.reason = "coupling block / c is not unitary (partial isometry structure broken)";
    return rec;
  }
  if (!is_unitary(OperatorMatrix(w0, j.tol * scale)) ||
      !is_unitary(OperatorMatrix(w1, j.tol * scale))) {
    rec.reason = "diagonal blocks of the unitary part are not unitary";
    return rec;
  }
  if ((w0 * ncpl - ncpl * w1).norm() > eta) {
    rec.reason = "unitary part does not commute with the nilpotent part";
    return rec;
  }

  rec.n = e0 * ncpl * e1.adjoint();
  rec.w = j.a - c * rec.n;
  rec.nil_defect = (rec.n * rec.n).norm();
  rec.partition_defect =
      (rec.n.adjoint() * rec.n + rec.n * rec.n.adjoint() - Mat::Identity(dim, dim)).norm();
  rec.commute_defect = (rec.w * rec.n - rec.n * rec.w).norm();
  rec.unitary_defect = (rec.w.adjoint() * rec.w - Mat::Identity(dim, dim)).norm();

  rec.model = JordanModel{OperatorMatrix(w0, j.tol), c};
  rec.basis = Mat(dim, dim);
  rec.basis.leftCols(d) = e0;
  rec.basis.rightCols(d) = e1 * ncpl.adjoint() * w0;
  rec.residual = (rec.basis.adjoint() * j.a * rec.basis - assemble(rec.model)).norm();

  rec.ok = rec.nil_defect <= eta && rec.partition_defect <= eta && rec.commute_defect <= eta &&
           rec.unitary_defect <= eta && rec.residual <= eta;
  if (!rec.ok && rec.reason.empty()) rec.reason = "reassembly residual above tolerance";
  return rec;
}

// ---------------------------------------------------------------------------
// rational functional calculus

namespace {

std::vector<cx> poly_derivative(const std::vector<cx>& p) {
  if (p.size() <= 1) return {cx(0.0, 0.0)};
  std::vector<cx> d(p.size() - 1);
  for (size_t k = 1; k < p.size(); ++k) d[k - 1] = double(k) * p[k];
  return d;
}

std::vector<cx> poly_multiply(const std::vector<cx>& p, const std::vector<cx>& q) {
  std::vector<cx> r(p.size() + q.size() - 1, cx(0.0, 0.0));
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

std::vector<cx> poly_sub(std::vector<cx> p, const std::vector<cx>& q) {
  if (q.size() > p.size()) p.resize(q.size(), cx(0.0, 0.0));
  for (size_t i = 0; i < q.size(); ++i) p[i] -= q[i];
  return p;
}

cx poly_eval(const std::vector<cx>& p, cx z) {
  cx acc(0.0, 0.0);
  for (size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
  return acc;
}

size_t poly_degree(const std::vector<cx>& p) {
  size_t deg = 0;
  for (size_t k = 0; k < p.size(); ++k)
    if (std::abs(p[k]) != 0.0) deg = k;
  return deg;
}

}  // namespace

Rational rational_derivative(const Rational& g) {
  Rational d;
  d.num = poly_sub(poly_multiply(poly_derivative(g.num), g.den),
                   poly_multiply(g.num, poly_derivative(g.den)));
  d.den = poly_multiply(g.den, g.den);
  return d;
}

Rational rational_multiply(const Rational& g, const Rational& h) {
  return Rational{poly_multiply(g.num, h.num), poly_multiply(g.den, h.den)};
}

cx rational_eval(const Rational& g, cx z) {
  const cx d = poly_eval(g.den, z);
  if (std::abs(d) == 0.0) throw std::domain_error("rational_eval: evaluation at a pole");
  return poly_eval(g.num, z) / d;
}

std::vector<cx> poly_roots(const std::vector<cx>& coeffs) {
  const size_t deg = poly_degree(coeffs);
  if (deg == 0) return {};
  Mat comp = Mat::Zero(deg, deg);
  for (size_t i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (size_t i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs[i] / coeffs[deg];
  Eigen::ComplexEigenSolver<Mat> es(comp, /*computeEigenvectors=*/false);
  return std::vector<cx>(es.eigenvalues().data(), es.eigenvalues().data() + deg);
}

nlohmann::json rational_to_json(const Rational& g) {
  auto dump = [](const std::vector<cx>& p) {
    nlohmann::json a = nlohmann::json::array();
    for (const cx& z : p) a.push_back({z.real(), z.imag()});
    return a;
  };
  return {{"num", dump(g.num)}, {"den", dump(g.den)}};
}

Rational rational_from_json(const nlohmann::json& j) {
  auto read = [](const nlohmann::json& a) {
    std::vector<cx> p;
    for (const auto& e : a) p.emplace_back(e[0].get<double>(), e[1].get<double>());
    if (p.empty()) p.emplace_back(0.0, 0.0);
    return p;
  };
  return Rational{read(j.at("num")), read(j.at("den"))};
}

Mat holo_calculus(const JordanModel& m, const Rational& g, double pole_gap) {
  const Eigen::Index d = m.block_dim();
  if (poly_degree(g.den) == 0 && std::abs(g.den[0]) == 0.0)
    throw std::invalid_argument("holo_calculus: zero denominator");

  // Schur form of a unitary matrix is diagonal, so Q gives orthonormal
  // eigenvectors even for clustered eigenvalues
  Eigen::ComplexSchur<Mat> schur(m.u.a);
  const Mat q = schur.matrixU();
  const Mat tri = schur.matrixT();
  const double offdiag =
      (tri - Mat(tri.diagonal().asDiagonal())).norm();
  if (offdiag > m.u.tol * std::max(1.0, tri.norm()) * 1e2)
    throw std::invalid_argument("holo_calculus: model unitary is not normal within tolerance");

  const Vec lam = tri.diagonal();
  for (const cx& pole : poly_roots(g.den)) {
    for (Eigen::Index i = 0; i < d; ++i)
      if (std::abs(pole - lam(i)) <= pole_gap)
        throw std::domain_error("holo_calculus: pole " + fmt_cx(pole) +
                                " within pole_gap of the spectrum");
  }

  const Rational dg = rational_derivative(g);
  Vec gv(d), dgv(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    gv(i) = rational_eval(g, lam(i));
    dgv(i) = rational_eval(dg, lam(i));
  }
  const Mat gu = q * gv.asDiagonal() * q.adjoint();
  const Mat ugpu = q * (lam.array() * dgv.array()).matrix().asDiagonal() * q.adjoint();

  Mat out = Mat::Zero(2 * d, 2 * d);
  out.block(0, 0, d, d) = gu;
  out.block(0, d, d, d) = m.c * ugpu;
  out.block(d, d, d, d) = gu;
  return out;
}

}  // namespace iso3
