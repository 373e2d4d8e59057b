#pragma once

#include <string>
#include <vector>

#include "iso3/hereditary.hpp"
#include "iso3/operator_matrix.hpp"

// Finite-window dilation built from the two-sided positive kernel
//   K(m, n) = Q+(n) T^(m-n)        for n <= m,
//   K(m, n) = (T*)^(n-m) Q+(m)     for m <= n,
// where Q+(n) = I + n b1 + n^2 b2. The Gram matrix of the window equals
// W* Q+(-N) W for the power stack W, which exhibits positivity directly and
// pins down the quotient construction of the shift Y and the embedding V.

namespace iso3 {

struct GnsWindow {
  int n_back = 6;   // window covers slots -n_back .. n_fwd
  int n_fwd = 6;
};

struct GnsDilation {
  GnsWindow window;
  Mat gram;                  // (B+1)n x (B+1)n, B = n_back + n_fwd
  double gram_lambda_min = 0.0;
  double psd_identity_residual = 0.0;  // |Gram - W* Q+(-N) W|
  Eigen::Index rank = 0;
  double rank_tol = 0.0;
  Mat coords;                // rank x (B+1)n whitened coordinate map
  Mat y;                     // compressed shift on the quotient space
  Mat v;                     // rank x n isometric embedding, V*V = I
  double v_isometry_defect = 0.0;
  std::vector<std::pair<int, double>> intertwine;  // (k, |V T^k - Y^k V|)
  double expansivity_lo = 0.0, expansivity_hi = 0.0;  // interior Rayleigh range
  double expansivity_bound = 0.0;                     // 2 (1 + c^2)
};

// Kernel block at integer slots (m, n).
Mat gns_kernel(const OperatorMatrix& t, int m, int n);

// Builds the window Gram, checks positivity against the power-stack identity,
// quotients out the kernel and compresses the slot shift. Throws
// std::domain_error when T is not a 3-isometry or the Gram dips below
// -1e-9 |Gram|.
GnsDilation build_dilation(const OperatorMatrix& t, double c, GnsWindow w = {});

struct YMembershipReport {
  bool ok = false;
  double fit_residual = 0.0;   // quadratic fit of alpha -> <Y^a* Y^a x, x>
  double margin = 0.0;         // min over the s-grid of the fitted pencil
  std::string detail;
};

// Tests whether the compressed shift inherits quadratic power growth with
// parameter c on the vectors V e_i, using interior powers only. Requires
// floor(min(n_back, n_fwd) / 2) >= 3, else throws std::invalid_argument.
YMembershipReport verify_y_in_fc(const GnsDilation& d, const OperatorMatrix& t,
                                 double c, double tol = 1e-7);

}  // namespace iso3
