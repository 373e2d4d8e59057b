#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iso3/operator_matrix.hpp"

// Hereditary calculus for 3-isometries.
//
// T is a 3-isometry when T*^3 T^3 - 3 T*^2 T^2 + 3 T*T - I = 0, equivalently
// when the power Grams grow exactly quadratically:
//
//   T*^n T^n = I + n b1 + n^2 b2,
//   b2 = (T*^2 T^2 - 2 T*T + I) / 2,
//   b1 = (-T*^2 T^2 + 4 T*T - 3I) / 2.
//
// Membership in the class with parameter c > 0 asks the quadratic pencil
//
//   Q(s) = (I - b2 / c^2) + s b1 + s^2 b2
//
// to stay PSD for every real s. Two independent certifiers are provided: a
// direct scan of lambda_min(Q(s)) over an adaptive bracket, and a Gram-matrix
// search (Q(s) PSD for all s iff some [[b0, C],[C*, b2]] >= 0 with
// C + C* = b1), plus a mode that cross-checks the two.

namespace iso3 {

struct QuadraticPencil {
  Mat b0, b1, b2;
  double c = 0.0;  // class parameter the pencil was built from, 0 if free-standing
};

Mat defect3(const OperatorMatrix& t);
bool is_3_isometry(const OperatorMatrix& t);

Mat b_two(const OperatorMatrix& t);
Mat b_one(const OperatorMatrix& t);
Mat b_zero(const OperatorMatrix& t, double c);

// I + s b1 + s^2 b2 (defined for every real s, 3-isometric or not)
Mat q_plus(const OperatorMatrix& t, double s);

QuadraticPencil q_pencil(const OperatorMatrix& t, double c);
Mat q_eval(const QuadraticPencil& p, double s);

struct ScanResult {
  double margin = 0.0;     // min over scanned s of lambda_min(Q(s))
  double witness_s = 0.0;  // argmin
  double bracket = 0.0;    // half-width S of the scanned interval
};

// Adaptive scan: uniform core on [-8, 8], geometric tail out to
// S = max(8, 4 (1+c)^2 / max(lambda_min(b2), tol)), golden-section refinement
// around the best local minima.
ScanResult scan_margin(const QuadraticPencil& p, double tol);

struct GramResult {
  std::optional<Mat> certificate;  // 2n x 2n PSD witness, affine-feasible
  bool converged = false;
  int iterations = 0;
  double gap = 0.0;  // final distance between cone and affine iterates
};

// Alternating projections with Dykstra correction between the PSD cone and
// the affine set {[[b0, C],[C*, b2]] : C + C* = b1}. Success certifies
// Q(s) >= 0 for all real s; non-convergence alone proves nothing.
GramResult gram_search(const QuadraticPencil& p, double tol, int max_iter = 5000);

enum class FcMethod { scan, gram, both };
enum class FcStatus { member, nonmember, boundary };

struct FcReport {
  double c = 0.0;
  FcStatus status = FcStatus::boundary;
  double margin = 0.0;
  double witness_s = 0.0;
  std::optional<Mat> certificate;
  std::string method;
  std::string detail;
};

FcReport fc_margin(const OperatorMatrix& t, double c, FcMethod method = FcMethod::both);

// Smallest c (bisection, relative tolerance 1e-6, caps [1e-4, 1e3]) whose
// pencil scan stays nonnegative; nullopt when even the upper cap fails.
// Requires is_3_isometry(t).
std::optional<double> minimal_c(const OperatorMatrix& t);

struct OmnibusReport {
  // slack >= 0 means the bound holds with room; each ok flag allows -tol*scale
  double slack_b2 = 0.0;    // c^2 - ||b2||
  double slack_b1 = 0.0;    // 2c - ||b1||
  double slack_norm = 0.0;  // 1 + c - ||T||
  double slack_convex = 0.0;  // min lambda_min(2(1+c^2) Qp(s) - Qp(s +- 1)) over grid
  bool ok_b2 = false, ok_b1 = false, ok_norm = false, ok_convex = false;
  bool all() const { return ok_b2 && ok_b1 && ok_norm && ok_convex; }
};

OmnibusReport check_omnibus(const OperatorMatrix& t, double c,
                            const std::vector<double>& s_grid = {-4, -3, -2, -1, 0, 1, 2, 3, 4});

struct IntertwineReport {
  double shift_residual = 0.0;  // max |T*^j Qp(n) T^j - Qp(n+j)|_F
  double b2_residual = 0.0;     // |T* b2 T - b2|_F
  double b1_residual = 0.0;     // |T* b1 T - (T*^2T^2 - I)/2|_F
  double max_residual() const;
};

IntertwineReport check_intertwining_identities(const OperatorMatrix& t, int n_lo = -6,
                                               int n_hi = 6, int j_max = 4);

struct GrowthFit {
  Mat b0_hat, b1_hat, b2_hat;
  double residual = 0.0;  // max_n |T*^n T^n - (b0 + n b1 + n^2 b2)|_F
};

// Least-squares fit of n -> T*^n T^n by a matrix quadratic over n = 0..n_max;
// independent oracle for defect3/b1/b2. Requires n_max >= 3.
GrowthFit fit_quadratic_growth(const OperatorMatrix& t, int n_max);

// (I - conj(lambda) T)(T - lambda)^{-1}; refuses when cond(T - lambda) > cap.
OperatorMatrix mobius(const OperatorMatrix& t, cx lambda, double cond_cap = 1e12);

// (1 + c^2/2 + c sqrt(1 + c^2/4)) - ||T||^2; nonnegative for class members,
// zero exactly on full Jordan models.
double norm_bound_check(const OperatorMatrix& t, double c);

}  // namespace iso3
