#include <doctest.h>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "iso3/fixtures.hpp"
#include "iso3/hereditary.hpp"
#include "iso3/herpoly.hpp"

using namespace iso3;

namespace {

bool same_terms(const HerPoly& p, const HerPoly& q, double tol = 1e-14) {
  if (p.size != q.size || p.terms.size() != q.terms.size()) return false;
  for (const auto& [ab, blk] : p.terms) {
    auto it = q.terms.find(ab);
    if (it == q.terms.end()) return false;
    if ((blk - it->second).norm() > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cubic law polynomial evaluates to the cubic defect") {
  HerPoly p = parse_hpoly("y^3 x^3 - 3 y^2 x^2 + 3 y x - 1");
  CHECK(p.degree() == 3);
  CHECK(print_hpoly(p) == "-1 + 3 y x - 3 y^2 x^2 + y^3 x^3");
  CHECK(same_terms(parse_hpoly(print_hpoly(p)), p));

  Rng rng(71);
  OperatorMatrix t(random_gaussian(3, 3, rng));
  CHECK((eval_hpoly(p, t) - defect3(t)).norm() <= 1e-12 * (1 + defect3(t).norm()));
}

TEST_CASE("single mixed term evaluates to the first power gram") {
  HerPoly p = parse_hpoly("y x");
  Rng rng(73);
  OperatorMatrix t(random_gaussian(4, 4, rng));
  CHECK((eval_hpoly(p, t) - t.a.adjoint() * t.a).norm() <= 1e-13);
}

TEST_CASE("matrix blocks and negative exponents evaluate by the kron rule") {
  HerPoly p = parse_hpoly("[[1,0],[0,2]] y^-1 x^2");
  REQUIRE(p.size == 2);
  Mat blk(2, 2);
  blk << cx(1, 0), cx(0, 0), cx(0, 0), cx(2, 0);

  Rng rng(79);
  OperatorMatrix t(haar_unitary(3, rng));
  Mat expect = Eigen::kroneckerProduct(
      blk, Mat(matpow(t.a, -1).adjoint() * matpow(t.a, 2)));
  CHECK((eval_hpoly(p, t) - expect).norm() <= 1e-12);
}

TEST_CASE("complex literals parse inside blocks") {
  HerPoly p = parse_hpoly("[[1+2i]] y x^2 + [[3i]] - [[2]] y");
  REQUIRE(p.size == 1);
  CHECK(p.terms.at({1, 2})(0, 0) == cx(1, 2));
  CHECK(p.terms.at({0, 0})(0, 0) == cx(0, 3));
  CHECK(p.terms.at({1, 0})(0, 0) == cx(-2, 0));
  CHECK(same_terms(parse_hpoly(print_hpoly(p)), p));
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(parse_hpoly("y^"), std::invalid_argument);
  CHECK_THROWS_AS(parse_hpoly("[[1,2],[3]] x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_hpoly("x +"), std::invalid_argument);
}

TEST_CASE("evaluation is linear in the polynomial") {
  HerPoly p = parse_hpoly("y^2 x - 2 x^2");
  HerPoly q = parse_hpoly("5 + y x");
  Rng rng(83);
  OperatorMatrix t(random_gaussian(3, 3, rng));
  Mat lhs = eval_hpoly(hpoly_add(p, hpoly_scale(q, cx(0, 2))), t);
  Mat rhs = eval_hpoly(p, t) + cx(0, 2) * eval_hpoly(q, t);
  CHECK((lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm()));
}

TEST_CASE("exponent shifts conjugate the evaluation by powers") {
  HerPoly p = parse_hpoly("y x - 2 + [[0,1],[1,0]] y^2 x");
  Rng rng(89);
  OperatorMatrix t(haar_unitary(3, rng));
  const Eigen::Index bs = p.size;
  for (auto [j, k] : {std::pair<int, int>{1, 2}, {2, 0}, {-1, 1}}) {
    Mat lhs = eval_hpoly(shift_hpoly(p, j, k), t);
    Mat pj = Eigen::kroneckerProduct(Mat::Identity(bs, bs), Mat(matpow(t.a, j)));
    Mat pk = Eigen::kroneckerProduct(Mat::Identity(bs, bs), Mat(matpow(t.a, k)));
    Mat rhs = pj.adjoint() * eval_hpoly(p, t) * pk;
    CHECK((lhs - rhs).norm() <= 1e-11 * (1 + rhs.norm()));
  }
}

TEST_CASE("json round-trip preserves every term") {
  HerPoly p = parse_hpoly("[[1+2i,0],[0,1]] y^3 x - [[0,1],[1,0]] x^2 + 4");
  CHECK(same_terms(hpoly_from_json(hpoly_to_json(p)), p));
}

TEST_CASE("hermitian symmetry detection") {
  CHECK(is_hermitian_symmetric(parse_hpoly("y x + 3 - y^2 x^2")));
  CHECK(is_hermitian_symmetric(parse_hpoly("[[2i]] y x^2 - [[2i]] y^2 x")));
  CHECK(!is_hermitian_symmetric(parse_hpoly("y x^2")));
}

TEST_CASE("tensoring with a cyclic shift never raises the bottom eigenvalue") {
  Rng rng(97);
  for (int trial = 0; trial < 3; ++trial) {
    HerPoly p;
    p.size = 1;
    for (auto [a, b] : {std::pair<int, int>{0, 0}, {1, 1}, {0, 2}, {1, 2}}) {
      Mat blk(1, 1);
      blk(0, 0) = a == b ? cx(rng.gauss(), 0.0) : rng.cgauss();
      p.add_term(a, b, blk);
      if (a != b) {
        Mat conj_blk = blk.adjoint();
        p.add_term(b, a, conj_blk);
      }
    }
    REQUIRE(is_hermitian_symmetric(p));
    OperatorMatrix t(random_gaussian(3, 3, rng));
    for (int m : {2, 3, 5}) {
      OperatorMatrix big = tensor_cyclic_shift(t, m);
      double lo_small = lambda_min(eval_hpoly(p, t));
      double lo_big = lambda_min(eval_hpoly(p, big));
      CHECK(lo_small >= lo_big - 1e-10 * (1 + std::abs(lo_big)));
    }
  }
}

TEST_CASE("root-of-unity averaging recovers the diagonal part exactly") {
  HerPoly p = parse_hpoly("2 y x - y^2 x + 3 x^2 + [[1i]] y^2 x^2");
  Rng rng(101);
  OperatorMatrix t(random_gaussian(3, 3, rng));
  CHECK(p.degree() == 2);
  for (int m : {5, 6, 9}) {
    CHECK(average_symmetrization_check(p, t, m) <= 1e-12 * (1 + opnorm(t.a)));
  }
  CHECK_THROWS_AS(average_symmetrization_check(p, t, 4), std::invalid_argument);
}

TEST_CASE("cesaro pairing distance halves like the weight deficit") {
  Rng rng(103);
  for (int trial = 0; trial < 3; ++trial) {
    const int gap = 1 + trial;  // |a - b|
    HerPoly p;
    p.size = 1;
    Mat blk(1, 1);
    blk(0, 0) = cx(0.7, -0.4);
    p.add_term(0, gap, blk);
    Mat adj = blk.adjoint();
    p.add_term(gap, 0, adj);

    OperatorMatrix t(random_gaussian(3, 3, rng));
    auto table = fejer_pairing_check(p, t, 2 * (3 + gap));
    const int n1 = 3 + gap;
    double d1 = table[n1 - 1].second;
    double d2 = table[2 * n1 - 1].second;
    REQUIRE(table[n1 - 1].first == n1);
    REQUIRE(d2 > 0.0);
    const double ratio = d1 / d2;
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);
    // exact law: dist scales with the missing Cesaro weight
    CHECK(ratio == doctest::Approx(double(4 * n1 + 1) / (2 * n1 + 1)).epsilon(1e-9));
  }
}
