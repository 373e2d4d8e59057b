#include "iso3/fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "iso3/hereditary.hpp"
#include "iso3/jordan.hpp"
#include "iso3/matrix_io.hpp"

namespace iso3 {

double Rng::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = unif(), u2 = unif();
  while (u1 <= 1e-300) u1 = unif();
  const double r = std::sqrt(-2.0 * std::log(u1));
  have_spare_ = true;
  spare_ = r * std::sin(2.0 * M_PI * u2);
  return r * std::cos(2.0 * M_PI * u2);
}

Mat random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.cgauss();
  return g;
}

Mat haar_unitary(Eigen::Index n, Rng& rng) {
  const Mat g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0.0) ? d / std::abs(d) : cx(1.0, 0.0);
  }
  return q;
}

Mat random_hermitian(Eigen::Index n, double radius, Rng& rng) {
  Mat h = hermitize(random_gaussian(n, n, rng));
  const double nrm = opnorm(h);
  if (nrm > 0.0) h *= radius / nrm;
  return h;
}

Mat random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const Mat g = random_gaussian(rows, cols, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = Mat::Identity(rows, cols);
  q = qr.householderQ() * q;
  return q;
}

std::string kind_name(FixtureKind k) {
  switch (k) {
    case FixtureKind::unitary: return "unitary";
    case FixtureKind::jordan: return "jordan";
    case FixtureKind::jordan_restriction: return "jordan_restriction";
    case FixtureKind::sym_jordan: return "sym_jordan";
    case FixtureKind::sym_restriction: return "sym_restriction";
    case FixtureKind::perturbed_negative: return "perturbed_negative";
  }
  throw std::logic_error("kind_name: bad enum");
}

FixtureKind kind_from_name(const std::string& s) {
  for (FixtureKind k : {FixtureKind::unitary, FixtureKind::jordan, FixtureKind::jordan_restriction,
                        FixtureKind::sym_jordan, FixtureKind::sym_restriction,
                        FixtureKind::perturbed_negative})
    if (kind_name(k) == s) return k;
  throw std::invalid_argument("unknown fixture kind: " + s);
}

namespace {

// Invariant subspace of a two-chain block operator (Jordan or symmetric
// Jordan): pick n2 whole Jordan chains and n1 eigenvector-only directions,
// 2*n2 + n1 = subdim. The span is exactly invariant; a random sub-rotation
// hides the chain basis.
struct ChainPick {
  std::vector<int> chains, singles;
};

ChainPick pick_chains(int d, int subdim, Rng& rng) {
  if (subdim < 1 || subdim > 2 * d)
    throw std::invalid_argument("fixture restriction: subdim out of range");
  const int n2_min = std::max(subdim - d, subdim >= 2 ? 1 : 0);
  const int n2_max = subdim / 2;
  if (n2_min > n2_max) throw std::invalid_argument("fixture restriction: no chain split fits");
  const int span = n2_max - n2_min + 1;
  const int n2 = n2_min + std::min(span - 1, int(rng.unif() * span));
  const int n1 = subdim - 2 * n2;

  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = d - 1; i > 0; --i) {  // Fisher-Yates with our own uniforms
    const int j = int(rng.unif() * (i + 1));
    std::swap(idx[i], idx[std::min(j, i)]);
  }
  ChainPick p;
  p.chains.assign(idx.begin(), idx.begin() + n2);
  p.singles.assign(idx.begin() + n2, idx.begin() + n2 + n1);
  return p;
}

// eigvec columns q_i of the top-left block; chain i spans {[q_i;0],[0;q_i]}
Mat chain_subspace(const Mat& q, const ChainPick& pick, Eigen::Index d, Rng& rng) {
  const int sub = int(2 * pick.chains.size() + pick.singles.size());
  Mat v = Mat::Zero(2 * d, sub);
  int col = 0;
  for (int i : pick.chains) {
    v.block(0, col, d, 1) = q.col(i);
    v.block(d, col + 1, d, 1) = q.col(i);
    col += 2;
  }
  for (int i : pick.singles) {
    v.block(0, col, d, 1) = q.col(i);
    ++col;
  }
  return v * haar_unitary(sub, rng);  // columns stay orthonormal
}

Fixture restriction_fixture(const FixtureSpec& spec, const Mat& ambient, const Mat& q,
                            const Mat& model_top, Rng& rng) {
  const Eigen::Index d = spec.dim;
  const ChainPick pick = pick_chains(spec.dim, spec.subdim, rng);
  const Mat v = chain_subspace(q, pick, d, rng);
  const Mat t = v.adjoint() * ambient * v;

  Fixture f;
  f.spec = spec;
  f.t = OperatorMatrix(t);
  f.ambient = ambient;
  f.embed = v;
  f.model_u = model_top;
  f.planted_residual = (v * t - ambient * v).norm();
  return f;
}

}  // namespace

Fixture make_fixture(const FixtureSpec& spec) {
  Rng rng(spec.seed);
  Fixture f;
  f.spec = spec;

  switch (spec.kind) {
    case FixtureKind::unitary: {
      f.t = OperatorMatrix(haar_unitary(spec.dim, rng));
      return f;
    }
    case FixtureKind::jordan: {
      const Mat u = haar_unitary(spec.dim, rng);
      f.t = OperatorMatrix(assemble(JordanModel{OperatorMatrix(u), spec.c}));
      f.model_u = u;
      return f;
    }
    case FixtureKind::jordan_restriction: {
      const Mat u = haar_unitary(spec.dim, rng);
      const Mat j = assemble(JordanModel{OperatorMatrix(u), spec.c});
      Eigen::ComplexSchur<Mat> schur(u);  // diagonal for unitary input
      return restriction_fixture(spec, j, schur.matrixU(), u, rng);
    }
    case FixtureKind::sym_jordan: {
      const Mat a = random_hermitian(spec.dim, 0.5 + 0.8 * rng.unif(), rng);
      f.t = OperatorMatrix(build_symmetric_jordan(OperatorMatrix(a), spec.c));
      f.model_u = a;
      return f;
    }
    case FixtureKind::sym_restriction: {
      const Mat a = random_hermitian(spec.dim, 0.5 + 0.8 * rng.unif(), rng);
      const Mat j = build_symmetric_jordan(OperatorMatrix(a), spec.c);
      Eigen::SelfAdjointEigenSolver<Mat> es(a);
      return restriction_fixture(spec, j, es.eigenvectors(), a, rng);
    }
    case FixtureKind::perturbed_negative: {
      const Mat u = haar_unitary(spec.dim, rng);
      const Mat j = assemble(JordanModel{OperatorMatrix(u), spec.c});
      Mat g = random_gaussian(2 * spec.dim, 2 * spec.dim, rng);
      g /= opnorm(g);
      double eta = spec.eta;
      for (int attempt = 0; attempt < 7; ++attempt) {
        OperatorMatrix t(j + eta * g);
        const double margin = scan_margin(q_pencil(t, spec.c), t.tol).margin;
        if (margin < -10.0 * t.tol) {
          f.t = t;
          f.certified_margin = margin;
          return f;
        }
        eta *= 2.0;
      }
      throw std::runtime_error("perturbed_negative: could not certify a negative margin");
    }
  }
  throw std::logic_error("make_fixture: bad kind");
}

std::vector<FixtureSpec> default_manifest() {
  std::vector<FixtureSpec> specs;
  auto put = [&](FixtureKind k, int dim, int sub, double c, std::uint64_t seed) {
    FixtureSpec s;
    s.kind = k;
    s.dim = dim;
    s.subdim = sub;
    s.c = c;
    s.seed = seed;
    s.name = kind_name(k) + "_d" + std::to_string(dim) +
             (sub ? "_s" + std::to_string(sub) : "") + "_seed" + std::to_string(seed);
    specs.push_back(std::move(s));
  };
  put(FixtureKind::unitary, 4, 0, 0.0, 11);
  put(FixtureKind::unitary, 7, 0, 0.0, 12);
  put(FixtureKind::jordan, 2, 0, 0.5, 21);
  put(FixtureKind::jordan, 4, 0, 0.7, 22);
  put(FixtureKind::jordan, 8, 0, 1.0, 23);
  put(FixtureKind::jordan_restriction, 4, 3, 0.5, 31);
  put(FixtureKind::jordan_restriction, 4, 5, 0.7, 32);
  put(FixtureKind::jordan_restriction, 6, 7, 0.4, 33);
  put(FixtureKind::jordan_restriction, 8, 9, 1.0, 34);
  put(FixtureKind::sym_jordan, 3, 0, 0.6, 41);
  put(FixtureKind::sym_jordan, 5, 0, 0.9, 42);
  put(FixtureKind::sym_restriction, 4, 3, 0.5, 51);
  put(FixtureKind::sym_restriction, 5, 6, 0.8, 52);
  put(FixtureKind::perturbed_negative, 3, 0, 0.5, 61);
  put(FixtureKind::perturbed_negative, 5, 0, 0.8, 62);
  return specs;
}

nlohmann::json manifest_to_json(const std::vector<FixtureSpec>& specs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : specs)
    arr.push_back({{"kind", kind_name(s.kind)},
                   {"dim", s.dim},
                   {"subdim", s.subdim},
                   {"c", s.c},
                   {"eta", s.eta},
                   {"seed", s.seed},
                   {"name", s.name}});
  return {{"fixtures", std::move(arr)}};
}

std::vector<FixtureSpec> manifest_from_json(const nlohmann::json& j) {
  std::vector<FixtureSpec> specs;
  for (const auto& e : j.at("fixtures")) {
    FixtureSpec s;
    s.kind = kind_from_name(e.at("kind").get<std::string>());
    s.dim = e.at("dim").get<int>();
    s.subdim = e.value("subdim", 0);
    s.c = e.value("c", 0.5);
    s.eta = e.value("eta", 0.1);
    s.seed = e.at("seed").get<std::uint64_t>();
    s.name = e.value("name", kind_name(s.kind));
    specs.push_back(std::move(s));
  }
  return specs;
}

void export_fixtures(const std::vector<FixtureSpec>& specs, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  nlohmann::json manifest = manifest_to_json(specs);
  auto& arr = manifest.at("fixtures");
  for (size_t i = 0; i < specs.size(); ++i) {
    const Fixture f = make_fixture(specs[i]);
    const std::string base = specs[i].name.empty() ? ("fixture_" + std::to_string(i))
                                                   : specs[i].name;
    save_matrix((fs::path(out_dir) / (base + ".json")).string(), f.t.a);
    arr[i]["file"] = base + ".json";
    if (f.embed) {
      save_matrix((fs::path(out_dir) / (base + ".embed.json")).string(), *f.embed);
      arr[i]["embed_file"] = base + ".embed.json";
    }
    if (f.ambient) {
      save_matrix((fs::path(out_dir) / (base + ".ambient.json")).string(), *f.ambient);
      arr[i]["ambient_file"] = base + ".ambient.json";
    }
    arr[i]["planted_residual"] = f.planted_residual;
  }
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace iso3
