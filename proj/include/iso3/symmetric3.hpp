#pragma once

#include <string>

#include "iso3/lift.hpp"
#include "iso3/operator_matrix.hpp"

// Continuous-parameter analogue of quadratic power growth. A is 3-symmetric
// when E(s) = exp(-isA*) exp(isA) is a quadratic polynomial in s; the
// coefficients have the closed forms B1 = i(A - A*) and
// B2 = (2 A*A - A*^2 - A^2) / 2. Exponentiating carries A to a member of the
// discrete class and back, which is how sym_lifting reuses fit_lifting.

namespace iso3 {

// E(s) = exp(-i s A*) exp(i s A)
Mat sym_e(const OperatorMatrix& a, double s);

struct SymCoefficients {
  Mat b1, b2;             // least-squares fit of E(s) - I against [s, s^2]
  double c_sym = 0.0;     // sqrt(|B2|)
  double fit_residual = 0.0;
  double closed_form_gap = 0.0;  // fit vs closed forms, relative
};

// Fits on a symmetric grid of `samples` points spanning [-s_max, s_max].
// Throws std::invalid_argument when samples < 5.
SymCoefficients sym_coefficients(const OperatorMatrix& a, int samples = 21,
                                 double s_max = 2.0);

struct SymCheck {
  bool ok = false;
  double deviation = 0.0;     // max_s |E(s) - (I + s B1 + s^2 B2)|
  double scale = 0.0;         // max_s |E(s)|
  double cubic_defect = 0.0;  // |A*^3 - 3 A*^2 A + 3 A* A^2 - A^3|, diagnostic
  SymCoefficients coeffs;
  std::string detail;
};

SymCheck check_3_symmetric(const OperatorMatrix& a, double tol = 1e-8);

// max residual of E(s+t) = exp(-isA*) (I + t B1 + t^2 B2) exp(isA) over a
// small (s, t) grid; zero for 3-symmetric A.
double sym_group_defect(const OperatorMatrix& a, const Mat& b1, const Mat& b2);

struct SymExistc {
  double c_sq_1 = 0.0;      // |B2|
  double c_sq_2 = 0.0;      // 2 |B2|
  double margin_1 = 0.0;    // min_s lambda_min(E(s) - B2 / c_sq_1)
  double margin_2 = 0.0;
  bool trivial = false;     // B2 = 0, selfadjoint case
};

SymExistc sym_existc_margins(const OperatorMatrix& a);

struct ExpBridge {
  double t0 = 1.0;   // min(1, pi / (2 rho(A)))
  OperatorMatrix t;  // exp(i t0 A)
};

ExpBridge exp_bridge(const OperatorMatrix& a);

// Principal logarithm pulled to the arc [theta_lo, theta_hi]: rotates by the
// arc midpoint, takes -i log, rotates back. Throws std::domain_error when an
// eigenvalue leaves the unit circle, falls outside the arc, or the round trip
// exp(i result) fails to reproduce the input to 1e-9.
Mat log_bridge(const Mat& w, double theta_lo, double theta_hi,
               double arc_pad = 1e-3);

enum class SymStatus { ok, selfadjoint_trivial, refused };

struct SymLifting {
  SymStatus status = SymStatus::refused;
  std::string detail;
  double t0 = 0.0;
  double c_sym = 0.0;
  OperatorMatrix t_exp{Mat::Identity(1, 1)};  // exp(i t0 A)
  LiftingCertificate cert;                    // discrete-level certificate
  Mat a_model;   // Hermitian block of the recovered model
  Mat j_sym;     // [[A, -i c I],[0, A]]
  double residual = 0.0;  // |V A - J_sym V|
  SymExistc existc;
};

// End-to-end: verify 3-symmetry, exponentiate, fit a discrete extension,
// trim stray spectrum, log back, assemble the selfadjoint-block model.
SymLifting sym_lifting(const OperatorMatrix& a, FitOptions fopts = {});

}  // namespace iso3
