#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "iso3/operator_matrix.hpp"

// Jordan models: block operators J = [[U, cU], [0, U]] with U unitary and
// c > 0. These are the extremal 3-isometries: J = W + cN with W = diag(U,U)
// unitary, N nilpotent of order two, [W,N] = 0, N*N + NN* = I, and every
// power gram is T*^k T^k = I + k c (W*N + N*W) + k^2 c^2 N*N.

namespace iso3 {

struct JordanModel {
  OperatorMatrix u;  // d x d unitary
  double c = 1.0;

  Eigen::Index block_dim() const { return u.dim(); }
};

Mat assemble(const JordanModel& m);

// validates unitarity of u (within u.tol) and c > 0
JordanModel build_jordan(const OperatorMatrix& u, double c);

// [[A, -icI], [0, A]] for Hermitian a; the 3-symmetric counterpart
Mat build_symmetric_jordan(const OperatorMatrix& a, double c);

struct JordanRecognition {
  bool ok = false;
  std::string reason;       // violated identity when !ok
  Mat w, n;                 // J = w + c n in the original coordinates
  Mat basis;                // unitary; basis* J basis == assemble(model)
  JordanModel model;        // recovered (U, c)
  double residual = 0.0;    // |basis* J basis - assemble(model)|_F
  double nil_defect = 0.0;        // |n^2|
  double partition_defect = 0.0;  // |n*n + nn* - I|
  double commute_defect = 0.0;    // |wn - nw|
  double unitary_defect = 0.0;    // |w*w - I|
};

// Splits j into unitary + c * nilpotent if possible. Uses the projection
// b2(j)/c^2 = N*N to locate the two ranges, then checks the block structure.
JordanRecognition recognize_jordan(const OperatorMatrix& j, double c);

// rational function num/den, coefficient arrays in ascending powers
struct Rational {
  std::vector<cx> num{cx(0.0, 0.0)};
  std::vector<cx> den{cx(1.0, 0.0)};
};

Rational rational_derivative(const Rational& g);
Rational rational_multiply(const Rational& g, const Rational& h);
cx rational_eval(const Rational& g, cx z);
std::vector<cx> poly_roots(const std::vector<cx>& coeffs);

nlohmann::json rational_to_json(const Rational& g);
Rational rational_from_json(const nlohmann::json& j);

// g(J) = [[g(U), c U g'(U)], [0, g(U)]], evaluated through the unitary
// eigendecomposition of U. Refuses poles within `pole_gap` of the spectrum.
Mat holo_calculus(const JordanModel& m, const Rational& g, double pole_gap = 1e-8);

}  // namespace iso3
