#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iso3/operator_matrix.hpp"

// Seeded test-operator corpus. All randomness flows through mt19937_64 with
// hand-rolled uniform/gaussian transforms (std distributions are not
// bit-stable across standard libraries), so a (kind, dims, c, seed) spec
// reproduces the same matrices everywhere.

namespace iso3 {

// uniform doubles from the top 53 bits, gaussians via Box-Muller
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double unif() { return double(eng() >> 11) * 0x1.0p-53; }
  double gauss();
  cx cgauss() { return cx(gauss(), gauss()) * M_SQRT1_2; }

 private:
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Mat random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Mat haar_unitary(Eigen::Index n, Rng& rng);                      // QR with phase fix
Mat random_hermitian(Eigen::Index n, double radius, Rng& rng);   // ||.|| = radius
Mat random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng);

enum class FixtureKind {
  unitary,
  jordan,
  jordan_restriction,
  sym_jordan,
  sym_restriction,
  perturbed_negative,
};

std::string kind_name(FixtureKind k);
FixtureKind kind_from_name(const std::string& s);

struct FixtureSpec {
  FixtureKind kind = FixtureKind::jordan;
  int dim = 4;      // model block dimension d (ambient is 2d for jordan kinds)
  int subdim = 0;   // restriction dimension, 0 when not applicable
  double c = 0.5;
  double eta = 0.1;  // perturbation size for perturbed_negative
  std::uint64_t seed = 1;
  std::string name;
};

struct Fixture {
  FixtureSpec spec;
  OperatorMatrix t;  // the operator under test

  // planted ground truth where the kind provides one
  std::optional<Mat> ambient;   // full Jordan / symmetric Jordan matrix
  std::optional<Mat> embed;     // isometry V with V*t = ambient*V... stored as ambient x sub
  std::optional<Mat> model_u;   // unitary U (jordan kinds) or Hermitian A (sym kinds)
  double planted_residual = 0.0;  // |V T - J V|_F for restrictions
  double certified_margin = 0.0;  // scan margin recorded for perturbed_negative
};

Fixture make_fixture(const FixtureSpec& spec);

std::vector<FixtureSpec> default_manifest();

nlohmann::json manifest_to_json(const std::vector<FixtureSpec>& specs);
std::vector<FixtureSpec> manifest_from_json(const nlohmann::json& j);

// writes <name>.json matrices plus manifest.json into out_dir
void export_fixtures(const std::vector<FixtureSpec>& specs, const std::string& out_dir);

}  // namespace iso3
