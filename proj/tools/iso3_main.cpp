// Command line front end. Matrices travel as .json ({"dim", "re", "im"}) or
// .csv (interleaved re,im columns); reports are JSON on stdout unless --out
// redirects them. Exit codes: 0 ok, 1 violation or refusal, 2 usage trouble,
// 3 boundary / indeterminate verdicts.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "iso3/factorization.hpp"
#include "iso3/fixtures.hpp"
#include "iso3/gns.hpp"
#include "iso3/hereditary.hpp"
#include "iso3/jordan.hpp"
#include "iso3/lift.hpp"
#include "iso3/matrix_io.hpp"
#include "iso3/serialize.hpp"
#include "iso3/symmetric3.hpp"
#include "iso3/version.hpp"

using namespace iso3;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kBoundary = 3;

void emit(const ojson& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << report.dump(2) << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

void print_defaults() {
  std::printf("numeric defaults\n");
  std::printf("  operator tolerance        1e-10 (scales with (1+|T|)^6 in the cubic test)\n");
  std::printf("  boundary band             10x tolerance around zero margin\n");
  std::printf("  pencil scan               161 points on [-8, 8], geometric tail, golden refinement\n");
  std::printf("  gram certificate          alternating projections, up to 5000 iterations\n");
  std::printf("  minimal c                 bisection on [1e-4, 1e3] to relative 1e-6\n");
  std::printf("  dilation window           6 back, 6 forward\n");
  std::printf("  lifting                   8 restarts, 200 sweeps, stop at relative 1e-9, seed 12345\n");
  std::printf("  trim                      spectral distance 1e-4, mass budget 1e-6, residual gate 1e-6\n");
  std::printf("  symmetric fit             21 samples of E(s) on [-2, 2]\n");
  std::printf("  exit codes                0 ok, 1 violation, 2 usage, 3 boundary/indeterminate\n");
}

FcMethod method_from_name(const std::string& name) {
  if (name == "scan") return FcMethod::scan;
  if (name == "gram") return FcMethod::gram;
  if (name == "both") return FcMethod::both;
  throw CLI::ValidationError("--method must be scan, gram, or both");
}

int run_check(const std::string& path, const std::string& out) {
  const OperatorMatrix t(load_matrix(path));
  const ojson report = check_json(t);
  emit(report, out);
  return report["is_3_isometry"].get<bool>() ? kOk : kViolation;
}

int run_certify(const std::string& path, double c, const std::string& method,
                const std::string& csv, const std::string& out) {
  const OperatorMatrix t(load_matrix(path));
  const FcReport rep = fc_margin(t, c, method_from_name(method));
  if (!csv.empty()) write_text(csv, scan_csv(q_pencil(t, c), -8.0, 8.0, 160));
  emit(fc_report_json(rep), out);
  switch (rep.status) {
    case FcStatus::member: return kOk;
    case FcStatus::nonmember: return kViolation;
    default: return kBoundary;
  }
}

int run_factor(const std::string& path, double c, const std::string& out) {
  const OperatorMatrix t(load_matrix(path));
  const FejerRieszResult res = fejer_riesz(q_pencil(t, c));
  emit(factor_json(res), out);
  switch (res.status) {
    case FactorStatus::ok: return kOk;
    case FactorStatus::refused_not_psd: return kViolation;
    default: return kBoundary;
  }
}

int run_dilate(const std::string& path, double c, const std::vector<int>& window,
               const std::string& csv, const std::string& out) {
  const OperatorMatrix t(load_matrix(path));
  const GnsWindow win{window[0], window[1]};
  const GnsDilation d = build_dilation(t, c, win);
  ojson report = dilation_json(d);
  if (std::min(win.n_back, win.n_fwd) / 2 >= 3) {
    const YMembershipReport y = verify_y_in_fc(d, t, c);
    report["shift_membership_ok"] = y.ok;
    report["shift_membership_margin"] = y.margin;
    report["shift_membership_fit_residual"] = y.fit_residual;
  }
  if (!csv.empty()) write_text(csv, residual_csv(d.intertwine));
  emit(report, out);
  return kOk;
}

int run_lift(const std::string& path, double c, const FitOptions& opts, const std::string& csv,
             const std::string& out) {
  const OperatorMatrix t(load_matrix(path));
  const LiftingCertificate cert = fit_lifting(t, c, opts);
  const LiftReport rep = verify_lifting(t, cert);
  if (!csv.empty()) write_text(csv, residual_csv(rep.power_residuals));
  emit(lifting_json(cert, rep), out);
  return cert.residual <= 1e-6 * std::max(1.0, opnorm(t.a)) ? kOk : kViolation;
}

int run_trim(const std::string& path, const std::string& lift_path, const std::string& out) {
  const OperatorMatrix t(load_matrix(path));
  std::ifstream f(lift_path);
  if (!f) throw std::runtime_error("cannot open lift report: " + lift_path);
  nlohmann::json lift;
  f >> lift;
  if (!lift.contains("u") || !lift.contains("v") || !lift.contains("c"))
    throw std::invalid_argument("lift report lacks the u/v/c certificate fields");

  LiftingCertificate cert;
  cert.model = JordanModel{OperatorMatrix(matrix_from_json(lift["u"])), lift["c"].get<double>()};
  cert.v = matrix_from_json(lift["v"]);
  const Eigen::Index d = cert.model.u.a.rows();
  if (cert.model.u.a.cols() != d)
    throw std::invalid_argument("lift report: u block must be square");
  if (cert.v.rows() != 2 * d || cert.v.cols() != t.a.rows())
    throw std::invalid_argument(
        "lift report does not match the operator: v is " + std::to_string(cert.v.rows()) + "x" +
        std::to_string(cert.v.cols()) + " but a " + std::to_string(2 * d) + "x" +
        std::to_string(t.a.rows()) + " embedding is needed");
  const Mat j = assemble(cert.model);
  cert.residual = (cert.v * t.a - j * cert.v).norm();
  cert.isometry_defect =
      (cert.v.adjoint() * cert.v - Mat::Identity(cert.v.cols(), cert.v.cols())).norm();

  const TrimResult res = trim_spectrum(t, cert);
  emit(trim_json(res), out);
  return res.ok ? kOk : kViolation;
}

int run_mobius(const std::string& path, const std::vector<double>& lambda,
               const std::string& out_matrix, const std::string& out) {
  const OperatorMatrix t(load_matrix(path));
  const cx lam(lambda[0], lambda[1]);
  const OperatorMatrix image = mobius(t, lam);
  if (!out_matrix.empty()) save_matrix(out_matrix, image.a);
  ojson report = check_json(image);
  report["report"] = "mobius";
  report["lambda_re"] = lam.real();
  report["lambda_im"] = lam.imag();
  emit(report, out);
  return report["is_3_isometry"].get<bool>() ? kOk : kViolation;
}

int run_sym_check(const std::string& path, const std::string& out) {
  const OperatorMatrix a(load_matrix(path));
  const SymCheck res = check_3_symmetric(a);
  emit(sym_check_json(res), out);
  return res.ok ? kOk : kViolation;
}

int run_sym_coefficients(const std::string& path, const std::string& out) {
  const OperatorMatrix a(load_matrix(path));
  const SymCoefficients coeffs = sym_coefficients(a);
  ojson report = report_header("sym_coefficients");
  report["c_sym"] = coeffs.c_sym;
  report["fit_residual"] = coeffs.fit_residual;
  report["closed_form_gap"] = coeffs.closed_form_gap;
  report["b1"] = matrix_to_json(coeffs.b1);
  report["b2"] = matrix_to_json(coeffs.b2);
  emit(report, out);
  return kOk;
}

int run_sym_bridge(const std::string& path, const std::string& out) {
  const OperatorMatrix a(load_matrix(path));
  const ExpBridge bridge = exp_bridge(a);
  const SymExistc existc = sym_existc_margins(a);
  ojson report = report_header("sym_bridge");
  report["t0"] = bridge.t0;
  report["exp_norm"] = opnorm(bridge.t.a);
  report["exp_cubic_defect"] = opnorm(defect3(bridge.t));
  report["exp_is_3_isometry"] = is_3_isometry(bridge.t);
  report["existc_margin_at_norm"] = existc.margin_1;
  report["existc_margin_at_twice_norm"] = existc.margin_2;
  report["selfadjoint_trivial"] = existc.trivial;
  emit(report, out);
  return report["exp_is_3_isometry"].get<bool>() ? kOk : kViolation;
}

int run_sym_lifting(const std::string& path, const FitOptions& opts, const std::string& out) {
  const OperatorMatrix a(load_matrix(path));
  const SymLifting res = sym_lifting(a, opts);
  emit(sym_lifting_json(res), out);
  return res.status == SymStatus::refused ? kViolation : kOk;
}

int run_fixtures_export(const std::string& dir, const std::string& manifest_path) {
  std::vector<FixtureSpec> specs;
  if (manifest_path.empty()) {
    specs = default_manifest();
  } else {
    std::ifstream f(manifest_path);
    if (!f) throw std::runtime_error("cannot open manifest: " + manifest_path);
    nlohmann::json j;
    f >> j;
    specs = manifest_from_json(j);
  }
  export_fixtures(specs, dir);
  ojson report = report_header("fixtures");
  report["count"] = specs.size();
  report["dir"] = dir;
  emit(report, "");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3-isometry toolkit: membership certificates, window dilations, model liftings"};
  app.set_version_flag("--version", kVersion);
  bool explain = false;
  app.add_flag("--explain", explain, "print numeric defaults and exit");
  app.require_subcommand(0, 1);

  std::string matrix_path, out_path, csv_path;
  double c = 0.0;

  auto* check = app.add_subcommand("check", "test the cubic isometry identity");
  check->add_option("matrix", matrix_path, "operator file (.json or .csv)")->required();
  check->add_option("--out", out_path, "write the report here instead of stdout");

  auto* certify = app.add_subcommand("certify", "membership margin for the class parameter c");
  certify->add_option("matrix", matrix_path)->required();
  certify->add_option("--c", c, "class parameter")->required();
  std::string method = "both";
  certify->add_option("--method", method, "scan, gram, or both (default both)");
  certify->add_option("--csv", csv_path, "write s,lambda_min samples on [-8, 8]");
  certify->add_option("--out", out_path);

  auto* factor = app.add_subcommand("factor", "degree-one factorization of the membership pencil");
  factor->add_option("matrix", matrix_path)->required();
  factor->add_option("--c", c)->required();
  factor->add_option("--out", out_path);

  auto* dilate = app.add_subcommand("dilate", "finite-window shift dilation");
  dilate->add_option("matrix", matrix_path)->required();
  dilate->add_option("--c", c)->required();
  std::vector<int> window{6, 6};
  dilate->add_option("--window", window, "slots back and forward (default 6 6)")->expected(2);
  dilate->add_option("--csv", csv_path, "write k,residual intertwining samples");
  dilate->add_option("--out", out_path);

  auto* lift = app.add_subcommand("lift", "fit a Jordan-model extension");
  lift->add_option("matrix", matrix_path)->required();
  lift->add_option("--c", c)->required();
  FitOptions fopts;
  lift->add_option("--dim", fopts.d, "model block size (default: escalate from dim T)");
  lift->add_option("--restarts", fopts.restarts);
  lift->add_option("--sweeps", fopts.sweeps);
  lift->add_option("--seed", fopts.seed);
  lift->add_flag("--allow-nonmember", fopts.allow_nonmember,
                 "fit even when the membership pencil scans negative");
  lift->add_option("--csv", csv_path, "write k,residual power checks");
  lift->add_option("--out", out_path);

  auto* trim = app.add_subcommand("trim", "delete unused model spectrum from a lift report");
  trim->add_option("matrix", matrix_path)->required();
  std::string lift_report;
  trim->add_option("--lift", lift_report, "lift report with the u/v/c certificate")->required();
  trim->add_option("--out", out_path);

  auto* mob = app.add_subcommand("mobius", "fractional transform of the operator");
  mob->add_option("matrix", matrix_path)->required();
  std::vector<double> lambda;
  mob->add_option("--lambda", lambda, "re and im parts")->expected(2)->required();
  std::string out_matrix;
  mob->add_option("--out-matrix", out_matrix, "write the transformed operator here");
  mob->add_option("--out", out_path);

  auto* sym = app.add_subcommand("sym", "continuous-parameter (exponential) analogues");
  sym->require_subcommand(1);
  auto* sym_check = sym->add_subcommand("check", "is E(s) quadratic in s");
  sym_check->add_option("matrix", matrix_path)->required();
  sym_check->add_option("--out", out_path);
  auto* sym_coeff = sym->add_subcommand("coefficients", "fitted quadratic coefficients");
  sym_coeff->add_option("matrix", matrix_path)->required();
  sym_coeff->add_option("--out", out_path);
  auto* sym_bridge = sym->add_subcommand("bridge", "exponentiate and test membership data");
  sym_bridge->add_option("matrix", matrix_path)->required();
  sym_bridge->add_option("--out", out_path);
  auto* sym_lift = sym->add_subcommand("lifting", "selfadjoint-block model extension");
  sym_lift->add_option("matrix", matrix_path)->required();
  FitOptions sopts;
  sym_lift->add_option("--dim", sopts.d);
  sym_lift->add_option("--restarts", sopts.restarts);
  sym_lift->add_option("--sweeps", sopts.sweeps);
  sym_lift->add_option("--seed", sopts.seed);
  sym_lift->add_option("--out", out_path);

  auto* fixtures = app.add_subcommand("fixtures", "seeded operator corpus");
  fixtures->require_subcommand(1);
  auto* fx_export = fixtures->add_subcommand("export", "write fixture matrices + manifest");
  std::string fx_dir = "fixtures_out", fx_manifest;
  fx_export->add_option("--dir", fx_dir, "output directory (default fixtures_out)");
  fx_export->add_option("--manifest", fx_manifest, "manifest to materialize instead of the default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (explain && app.get_subcommands().empty()) {
      print_defaults();
      return kOk;
    }
    if (check->parsed()) return run_check(matrix_path, out_path);
    if (certify->parsed()) return run_certify(matrix_path, c, method, csv_path, out_path);
    if (factor->parsed()) return run_factor(matrix_path, c, out_path);
    if (dilate->parsed()) return run_dilate(matrix_path, c, window, csv_path, out_path);
    if (lift->parsed()) return run_lift(matrix_path, c, fopts, csv_path, out_path);
    if (trim->parsed()) return run_trim(matrix_path, lift_report, out_path);
    if (mob->parsed()) return run_mobius(matrix_path, lambda, out_matrix, out_path);
    if (sym->parsed()) {
      if (sym_check->parsed()) return run_sym_check(matrix_path, out_path);
      if (sym_coeff->parsed()) return run_sym_coefficients(matrix_path, out_path);
      if (sym_bridge->parsed()) return run_sym_bridge(matrix_path, out_path);
      if (sym_lift->parsed()) return run_sym_lifting(matrix_path, sopts, out_path);
    }
    if (fixtures->parsed() && fx_export->parsed())
      return run_fixtures_export(fx_dir, fx_manifest);
    std::cout << app.help();
    return kOk;
  } catch (const std::domain_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
