#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "iso3/fixtures.hpp"
#include "iso3/hereditary.hpp"
#include "iso3/jordan.hpp"
#include "iso3/symmetric3.hpp"

using namespace iso3;

namespace {
const cx kI(0.0, 1.0);
}

TEST_CASE("conjugated exponentials of a nilpotent pair are exactly quadratic") {
  Mat a(2, 2);
  a << cx(0, 0), cx(0, -1), cx(0, 0), cx(0, 0);
  OperatorMatrix op(a);

  SymCheck chk = check_3_symmetric(op);
  CHECK(chk.ok);
  CHECK(chk.cubic_defect <= 1e-12);

  // frozen coefficients: B1 = [[0,1],[1,0]], B2 = diag(0,1)
  CHECK((chk.coeffs.b1 - (Mat(2, 2) << cx(0, 0), cx(1, 0), cx(1, 0), cx(0, 0))
                             .finished()).norm() <= 1e-9);
  CHECK((chk.coeffs.b2 - (Mat(2, 2) << cx(0, 0), cx(0, 0), cx(0, 0), cx(1, 0))
                             .finished()).norm() <= 1e-9);
  CHECK(chk.coeffs.c_sym == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(chk.coeffs.closed_form_gap <= 1e-9);
}

TEST_CASE("hermitian-block models and their restrictions pass the check") {
  for (std::uint64_t seed : {601, 602}) {
    Fixture fx = make_fixture({FixtureKind::sym_restriction, 3, 4, 0.7, 0.1, seed, "s"});
    SymCheck chk = check_3_symmetric(fx.t);
    CHECK(chk.ok);
    CHECK(sym_group_defect(fx.t, chk.coeffs.b1, chk.coeffs.b2) <= 1e-8 * chk.scale);
  }
}

TEST_CASE("generic operators fail the quadratic test") {
  Rng rng(603);
  OperatorMatrix a(random_gaussian(3, 3, rng));
  SymCheck chk = check_3_symmetric(a);
  CHECK(!chk.ok);
  CHECK(chk.detail.find("not quadratic") != std::string::npos);
}

TEST_CASE("coefficient fit needs five samples") {
  Rng rng(604);
  OperatorMatrix a(random_hermitian(2, 1.0, rng));
  CHECK_THROWS_AS(sym_coefficients(a, 4), std::invalid_argument);
}

TEST_CASE("growth margins stay nonnegative at the critical parameter") {
  Fixture fx = make_fixture({FixtureKind::sym_restriction, 3, 4, 0.8, 0.1, 605, "m"});
  SymExistc ex = sym_existc_margins(fx.t);
  REQUIRE(!ex.trivial);
  CHECK(ex.margin_1 >= -1e-8);
  CHECK(ex.margin_2 >= ex.margin_1 - 1e-12);
  CHECK(ex.c_sq_2 == doctest::Approx(2.0 * ex.c_sq_1));
}

TEST_CASE("exponential bridge scales the growth coefficients") {
  Fixture fx = make_fixture({FixtureKind::sym_restriction, 2, 3, 0.6, 0.1, 606, "b"});
  SymCheck chk = check_3_symmetric(fx.t);
  REQUIRE(chk.ok);
  ExpBridge br = exp_bridge(fx.t);
  CHECK(br.t0 <= 1.0);
  REQUIRE(is_3_isometry(br.t));
  CHECK((b_one(br.t) - br.t0 * chk.coeffs.b1).norm() <= 1e-8);
  CHECK((b_two(br.t) - br.t0 * br.t0 * chk.coeffs.b2).norm() <= 1e-8);
}

TEST_CASE("logarithm undoes the exponential on a known arc") {
  Rng rng(607);
  Mat h = random_hermitian(3, 1.2, rng);
  Mat u = (kI * h).exp();
  Mat back = log_bridge(u, -1.2, 1.2);
  CHECK((back - h).norm() <= 1e-9);
  CHECK(((kI * back).exp() - u).norm() <= 1e-9);
}

TEST_CASE("logarithm refuses spectrum off the circle or off the arc") {
  Rng rng(608);
  Mat h = random_hermitian(3, 1.0, rng);
  Mat u = (kI * h).exp();
  CHECK_THROWS_AS(log_bridge(0.5 * u, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(log_bridge(u, -0.05, 0.05), std::domain_error);
  CHECK_THROWS_AS(log_bridge(u, -3.2, 3.2), std::domain_error);
}

TEST_CASE("selfadjoint inputs come back as trivial extensions") {
  Rng rng(609);
  OperatorMatrix a(random_hermitian(3, 1.5, rng));
  SymLifting out = sym_lifting(a);
  CHECK(out.status == SymStatus::selfadjoint_trivial);
  CHECK(out.residual == 0.0);
  CHECK(out.detail.find("selfadjoint") != std::string::npos);
}

TEST_CASE("operators failing the quadratic test are refused") {
  Rng rng(610);
  SymLifting out = sym_lifting(OperatorMatrix(random_gaussian(3, 3, rng)));
  CHECK(out.status == SymStatus::refused);
}

TEST_CASE("full pipeline recovers a hermitian-block extension") {
  Fixture fx = make_fixture({FixtureKind::sym_restriction, 3, 3, 0.7, 0.1, 611, "pipe"});
  const double scale = std::max(1.0, opnorm(fx.t.a));
  SymLifting out = sym_lifting(fx.t);
  REQUIRE(out.status == SymStatus::ok);
  CHECK(out.cert.residual <= 1e-8 * scale);
  CHECK(out.residual <= 1e-5 * scale);
  CHECK((out.a_model - out.a_model.adjoint()).norm() <= 1e-12);
  CHECK(out.existc.margin_1 >= -1e-8);

  // the reported model really is [[A, -icI],[0, A]]
  const Eigen::Index d = out.a_model.rows();
  CHECK((out.j_sym.block(0, d, d, d) -
         cx(0, -out.c_sym) * Mat::Identity(d, d)).norm() <= 1e-12);
  // and V genuinely intertwines
  CHECK((out.cert.v * fx.t.a - out.j_sym * out.cert.v).norm() <= 1e-5 * scale);
}
