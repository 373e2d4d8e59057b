#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "iso3/fixtures.hpp"
#include "iso3/hereditary.hpp"
#include "iso3/jordan.hpp"
#include "iso3/matrix_io.hpp"

using namespace iso3;

TEST_CASE("same spec reproduces bit-identical matrices") {
  FixtureSpec spec{FixtureKind::jordan_restriction, 4, 5, 0.8, 0.1, 42, "r"};
  Fixture a = make_fixture(spec);
  Fixture b = make_fixture(spec);
  REQUIRE(a.t.dim() == b.t.dim());
  CHECK((a.t.a - b.t.a).norm() == 0.0);
  REQUIRE(a.embed.has_value());
  CHECK((*a.embed - *b.embed).norm() == 0.0);

  FixtureSpec other = spec;
  other.seed = 43;
  CHECK((make_fixture(other).t.a - a.t.a).norm() != 0.0);
}

TEST_CASE("haar sampling produces unitaries, hermitians hit their radius") {
  Rng rng(55);
  Mat u = haar_unitary(5, rng);
  CHECK((u.adjoint() * u - Mat::Identity(5, 5)).norm() <= 1e-12);
  Mat h = random_hermitian(4, 0.7, rng);
  CHECK((h - h.adjoint()).norm() == 0.0);
  CHECK(opnorm(h) == doctest::Approx(0.7).epsilon(1e-12));
  Mat v = random_isometry(6, 3, rng);
  CHECK((v.adjoint() * v - Mat::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("restriction fixtures plant an exact extension certificate") {
  for (auto kind : {FixtureKind::jordan_restriction, FixtureKind::sym_restriction}) {
    for (std::uint64_t seed : {7, 8, 9}) {
      Fixture fx = make_fixture({kind, 3, 4, 0.6, 0.1, seed, "p"});
      REQUIRE(fx.ambient.has_value());
      REQUIRE(fx.embed.has_value());
      CHECK(fx.planted_residual <= 1e-12);
      CHECK((*fx.embed * fx.t.a - *fx.ambient * *fx.embed).norm() <= 1e-12);
      CHECK((fx.embed->adjoint() * *fx.embed - Mat::Identity(4, 4)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("jordan fixtures really are models and members") {
  Fixture fx = make_fixture({FixtureKind::jordan, 3, 0, 0.9, 0.1, 11, "j"});
  REQUIRE(fx.model_u.has_value());
  CHECK((fx.t.a - assemble(JordanModel{OperatorMatrix(*fx.model_u), 0.9})).norm() ==
        0.0);
  CHECK(is_3_isometry(fx.t));

  Fixture un = make_fixture({FixtureKind::unitary, 4, 0, 0.5, 0.1, 12, "u"});
  CHECK(is_unitary(un.t));
}

TEST_CASE("perturbed fixtures certify their own negativity") {
  Fixture fx = make_fixture(
      {FixtureKind::perturbed_negative, 3, 4, 0.6, 0.12, 13, "neg"});
  CHECK(fx.certified_margin < 0.0);
  ScanResult sc = scan_margin(q_pencil(fx.t, 0.6), 1e-10);
  CHECK(sc.margin < 0.0);
}

TEST_CASE("manifest json round-trips") {
  auto specs = default_manifest();
  REQUIRE(!specs.empty());
  auto back = manifest_from_json(manifest_to_json(specs));
  REQUIRE(back.size() == specs.size());
  for (size_t i = 0; i < specs.size(); ++i) {
    CHECK(back[i].kind == specs[i].kind);
    CHECK(back[i].dim == specs[i].dim);
    CHECK(back[i].subdim == specs[i].subdim);
    CHECK(back[i].c == specs[i].c);
    CHECK(back[i].seed == specs[i].seed);
    CHECK(back[i].name == specs[i].name);
  }
}

TEST_CASE("the default corpus materializes without errors") {
  for (const auto& spec : default_manifest()) {
    Fixture fx = make_fixture(spec);
    CHECK(fx.t.dim() > 0);
  }
}

TEST_CASE("export writes loadable matrices and a manifest") {
  std::vector<FixtureSpec> specs = {
      {FixtureKind::jordan_restriction, 3, 4, 0.7, 0.1, 21, "exp_a"},
      {FixtureKind::unitary, 3, 0, 0.5, 0.1, 22, "exp_b"},
  };
  export_fixtures(specs, "fixture_export");

  std::ifstream in("fixture_export/manifest.json");
  REQUIRE(in.good());
  nlohmann::json manifest;
  in >> manifest;
  REQUIRE(manifest["fixtures"].size() == 2);

  Fixture fx = make_fixture(specs[0]);
  Mat t = load_matrix("fixture_export/exp_a.json");
  CHECK((t - fx.t.a).norm() == 0.0);
  Mat v = load_matrix("fixture_export/exp_a.embed.json");
  CHECK((v - *fx.embed).norm() == 0.0);
}
