#include <doctest.h>

#include <sstream>

#include "iso3/fixtures.hpp"
#include "iso3/serialize.hpp"
#include "iso3/version.hpp"

using namespace iso3;

TEST_CASE("scan csv has the pinned header and parses back") {
  Fixture fx = make_fixture(
      {FixtureKind::jordan_restriction, 3, 4, 0.7, 0.1, 701, "csv"});
  std::string csv = scan_csv(q_pencil(fx.t, 0.7), -2.0, 2.0, 8);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "s,lambda_min");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    double s = 0, lm = 0;
    CHECK(std::sscanf(line.c_str(), "%lf,%lf", &s, &lm) == 2);
    CHECK(lm >= -1e-8);  // member pencil stays nonnegative on the grid
    ++rows;
  }
  CHECK(rows == 9);
}

TEST_CASE("residual csv has the pinned header") {
  std::string csv = residual_csv({{1, 1e-12}, {-2, 3e-11}});
  CHECK(csv.rfind("k,residual\n", 0) == 0);
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(csv.find("\n-2,") != std::string::npos);
}

TEST_CASE("reports carry the version and kind, and serialize stably") {
  ojson h = report_header("check");
  CHECK(h["version"] == kVersion);
  CHECK(std::string(kVersion) == "0.1.0");
  CHECK(h["report"] == "check");
  CHECK(h.dump() == std::string("{\"version\":\"0.1.0\",\"report\":\"check\"}"));
}

TEST_CASE("identical inputs give byte-identical reports") {
  FixtureSpec spec{FixtureKind::jordan_restriction, 3, 4, 0.6, 0.1, 702, "rep"};
  auto make_report = [&]() {
    Fixture fx = make_fixture(spec);
    return fc_report_json(fc_margin(fx.t, 0.6)).dump(2);
  };
  std::string one = make_report();
  std::string two = make_report();
  CHECK(one == two);
  CHECK(one.find("\"status\"") != std::string::npos);
}

TEST_CASE("check report flags the cubic law") {
  Fixture fx = make_fixture({FixtureKind::jordan, 3, 0, 0.5, 0.1, 703, "chk"});
  ojson j = check_json(fx.t);
  CHECK(j["is_3_isometry"] == true);
  CHECK(j["dim"] == 6);

  Mat bad(1, 1);
  bad(0, 0) = 2.0;
  ojson jb = check_json(OperatorMatrix(bad));
  CHECK(jb["is_3_isometry"] == false);
  CHECK(jb["cubic_defect"].get<double>() == doctest::Approx(27.0));
}
