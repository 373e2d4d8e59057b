#pragma once

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

#include "iso3/operator_matrix.hpp"

// Hereditary polynomials: finite sums  p = sum_{a,b} p_{ab} y^a x^b  with
// square matrix coefficients, evaluated hereditarily (adjoints on the left):
//
//   p(T*, T) = sum_{a,b} p_{ab} (x) T*^a T^b            (Kronecker blocks)
//
// Exponents may be negative when T is invertible. The text grammar accepts
// terms like "y^3 x^3 - 3 y x + [[1,0],[0,2]] y^-1 x^2"; scalar coefficients
// mean multiples of the identity block, "^1" may be dropped, whitespace is
// free. parse(print(p)) == p on canonical forms (terms sorted by (a,b),
// zero blocks dropped).

namespace iso3 {

struct HerPoly {
  Eigen::Index size = 1;                   // coefficient block size
  std::map<std::pair<int, int>, Mat> terms;  // (a,b) -> size x size block

  void add_term(int a, int b, const Mat& block);  // accumulates, drops zeros
  int degree() const;                             // max over terms of max(|a|,|b|)
};

HerPoly parse_hpoly(const std::string& text);
std::string print_hpoly(const HerPoly& p);

nlohmann::json hpoly_to_json(const HerPoly& p);
HerPoly hpoly_from_json(const nlohmann::json& j);

HerPoly hpoly_add(const HerPoly& p, const HerPoly& q);
HerPoly hpoly_scale(const HerPoly& p, cx factor);

// p -> y^j p x^k, i.e. (a,b) -> (a+j, b+k)
HerPoly shift_hpoly(const HerPoly& p, int j, int k);

// keeps only the diagonal terms a == b
HerPoly symmetrize(const HerPoly& p);

// p_{ab} == p_{ba}* for every term (such p evaluate to Hermitian operators)
bool is_hermitian_symmetric(const HerPoly& p, double tol = 1e-12);

// p(T*, T); size p.size * dim(T)
Mat eval_hpoly(const HerPoly& p, const OperatorMatrix& t);

// T (x) S_m with S_m the cyclic shift on C^m
OperatorMatrix tensor_cyclic_shift(const OperatorMatrix& t, int m);

// | (1/m) sum_k p(w^-k T*, w^k T) - p_sym(T*, T) |, w = exp(2 pi i/m).
// Exact (round-off) when m > 2 * degree(p); that bound is enforced.
double average_symmetrization_check(const HerPoly& p, const OperatorMatrix& t, int m);

// Cesaro-weighted pairings: for each N, the weighted evaluation with weights
// max(2N+1-|a-b|, 0)/(2N+1) and its operator-norm distance to p(T*,T).
// The distance decays like 1/N for polynomials with off-diagonal terms.
std::vector<std::pair<int, double>> fejer_pairing_check(const HerPoly& p,
                                                        const OperatorMatrix& t, int n_max);

}  // namespace iso3
