#pragma once

#include <optional>
#include <string>

#include "iso3/hereditary.hpp"
#include "iso3/operator_matrix.hpp"

// Sum-of-squares certificates for quadratic operator pencils.
//
// A pencil Q(s) = b0 + s b1 + s^2 b2 that stays PSD on the real line factors
// as Q(s) = (V0 + s V1)* (V0 + s V1); the factor pair is read off a PSD Gram
// matrix [[b0, C],[C*, b2]] with C + C* = b1 (the skew part of C is the
// search variable). Built on gram_search / scan_margin from the hereditary
// module, so the same certificate backs both membership and factorization.

namespace iso3 {

struct PencilFactor {
  Mat v0, v1;         // rows x n, rows <= 2n after zero-row trimming
  double res_b0 = 0;  // |v0*v0 - b0|_F
  double res_b1 = 0;  // |v0*v1 + v1*v0 - b1|_F
  double res_b2 = 0;  // |v1*v1 - b2|_F
  double max_residual() const { return std::max({res_b0, res_b1, res_b2}); }
};

enum class FactorStatus { ok, refused_not_psd, indeterminate };

struct FejerRieszResult {
  FactorStatus status = FactorStatus::indeterminate;
  std::optional<PencilFactor> factor;
  double scan_margin = 0.0;
  double witness_s = 0.0;  // where the pencil goes negative on refusal
  std::string detail;
};

// tol drives the scan/gram thresholds and the eigenvalue clipping in the PSD
// square root; rows with singular value < 1e-12 are trimmed from the factor.
FejerRieszResult fejer_riesz(const QuadraticPencil& p, double tol = 1e-10);

struct CpWitness {
  Mat square_root;  // Z with Z*Z = X0 (x) b0 + X1 (x) b1 + X2 (x) b2
  Mat value;        // Z*Z
  double match_residual = 0.0;
};

// For Hermitian X0, X1, X2 with [[X0, X1],[X1, X2]] PSD, exhibits
// sum_j Xj (x) bj as an explicit square. Throws when the block matrix is not
// PSD within tol or the pencil itself resists factoring.
CpWitness gram_to_cp_witness(const QuadraticPencil& p, const Mat& x0, const Mat& x1,
                             const Mat& x2, double tol = 1e-10);

}  // namespace iso3
