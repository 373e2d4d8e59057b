#include "iso3/serialize.hpp"

#include <cstdio>

#include "iso3/matrix_io.hpp"
#include "iso3/version.hpp"

namespace iso3 {

namespace {

const char* fc_status_name(FcStatus s) {
  switch (s) {
    case FcStatus::member: return "member";
    case FcStatus::nonmember: return "nonmember";
    default: return "boundary";
  }
}

const char* factor_status_name(FactorStatus s) {
  switch (s) {
    case FactorStatus::ok: return "ok";
    case FactorStatus::refused_not_psd: return "refused_not_psd";
    default: return "indeterminate";
  }
}

const char* sym_status_name(SymStatus s) {
  switch (s) {
    case SymStatus::ok: return "ok";
    case SymStatus::selfadjoint_trivial: return "selfadjoint_trivial";
    default: return "refused";
  }
}

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ojson report_header(const std::string& kind) {
  ojson j;
  j["version"] = kVersion;
  j["report"] = kind;
  return j;
}

ojson check_json(const OperatorMatrix& t) {
  ojson j = report_header("check");
  j["dim"] = t.dim();
  j["norm"] = opnorm(t.a);
  j["cubic_defect"] = opnorm(defect3(t));
  j["is_3_isometry"] = is_3_isometry(t);
  if (j["is_3_isometry"].get<bool>()) {
    j["b1_norm"] = opnorm(b_one(t));
    j["b2_norm"] = opnorm(b_two(t));
  }
  return j;
}

ojson fc_report_json(const FcReport& r) {
  ojson j = report_header("certify");
  j["c"] = r.c;
  j["status"] = fc_status_name(r.status);
  j["margin"] = r.margin;
  j["witness_s"] = r.witness_s;
  j["method"] = r.method;
  j["detail"] = r.detail;
  if (r.certificate) j["certificate"] = matrix_to_json(*r.certificate);
  return j;
}

ojson factor_json(const FejerRieszResult& r) {
  ojson j = report_header("factor");
  j["status"] = factor_status_name(r.status);
  j["scan_margin"] = r.scan_margin;
  j["witness_s"] = r.witness_s;
  j["detail"] = r.detail;
  if (r.factor) {
    j["v0"] = matrix_to_json(r.factor->v0);
    j["v1"] = matrix_to_json(r.factor->v1);
    j["residual_b0"] = r.factor->res_b0;
    j["residual_b1"] = r.factor->res_b1;
    j["residual_b2"] = r.factor->res_b2;
  }
  return j;
}

ojson dilation_json(const GnsDilation& d) {
  ojson j = report_header("dilate");
  j["window_back"] = d.window.n_back;
  j["window_fwd"] = d.window.n_fwd;
  j["rank"] = d.rank;
  j["rank_tol"] = d.rank_tol;
  j["gram_lambda_min"] = d.gram_lambda_min;
  j["psd_identity_residual"] = d.psd_identity_residual;
  j["v_isometry_defect"] = d.v_isometry_defect;
  ojson rows = ojson::array();
  for (auto& [k, res] : d.intertwine) rows.push_back({{"k", k}, {"residual", res}});
  j["intertwine"] = rows;
  j["expansivity_lo"] = d.expansivity_lo;
  j["expansivity_hi"] = d.expansivity_hi;
  j["expansivity_bound"] = d.expansivity_bound;
  return j;
}

ojson lifting_json(const LiftingCertificate& cert, const LiftReport& rep) {
  ojson j = report_header("lift");
  j["c"] = cert.model.c;
  j["model_dim"] = cert.model.block_dim();
  j["residual"] = cert.residual;
  j["isometry_defect"] = cert.isometry_defect;
  j["restarts_used"] = cert.restarts_used;
  j["spectral_gap"] = rep.spectral_gap;
  j["t_invertible"] = rep.t_invertible;
  ojson rows = ojson::array();
  for (auto& [k, res] : rep.power_residuals)
    rows.push_back({{"k", k}, {"residual", res}});
  j["power_residuals"] = rows;
  j["u"] = matrix_to_json(cert.model.u.a);
  j["v"] = matrix_to_json(cert.v);
  return j;
}

ojson trim_json(const TrimResult& r) {
  ojson j = report_header("trim");
  j["ok"] = r.ok;
  j["reason"] = r.reason;
  ojson del = ojson::array();
  for (auto& [lam, mass] : r.deleted)
    del.push_back({{"re", lam.real()}, {"im", lam.imag()}, {"mass", mass}});
  j["deleted"] = del;
  if (r.ok) {
    j["model_dim"] = r.cert.model.block_dim();
    j["residual"] = r.cert.residual;
    j["isometry_defect"] = r.cert.isometry_defect;
    j["u"] = matrix_to_json(r.cert.model.u.a);
    j["v"] = matrix_to_json(r.cert.v);
  }
  return j;
}

ojson sym_check_json(const SymCheck& r) {
  ojson j = report_header("sym_check");
  j["ok"] = r.ok;
  j["deviation"] = r.deviation;
  j["scale"] = r.scale;
  j["cubic_defect"] = r.cubic_defect;
  j["c_sym"] = r.coeffs.c_sym;
  j["fit_residual"] = r.coeffs.fit_residual;
  j["closed_form_gap"] = r.coeffs.closed_form_gap;
  j["detail"] = r.detail;
  return j;
}

ojson sym_lifting_json(const SymLifting& r) {
  ojson j = report_header("sym_lift");
  j["status"] = sym_status_name(r.status);
  j["detail"] = r.detail;
  j["t0"] = r.t0;
  j["c_sym"] = r.c_sym;
  j["residual"] = r.residual;
  j["existc_margin_at_norm"] = r.existc.margin_1;
  j["existc_margin_at_twice_norm"] = r.existc.margin_2;
  if (r.status == SymStatus::ok) {
    j["model_dim"] = r.a_model.rows();
    j["a_model"] = matrix_to_json(r.a_model);
    j["v"] = matrix_to_json(r.cert.v);
  }
  return j;
}

std::string scan_csv(const QuadraticPencil& p, double lo, double hi, int steps) {
  std::string out = "s,lambda_min\n";
  for (int k = 0; k <= steps; ++k) {
    const double s = lo + (hi - lo) * k / steps;
    out += fmt_g(s);
    out += ',';
    out += fmt_g(lambda_min(q_eval(p, s)));
    out += '\n';
  }
  return out;
}

std::string residual_csv(const std::vector<std::pair<int, double>>& rows) {
  std::string out = "k,residual\n";
  for (auto& [k, res] : rows) {
    out += std::to_string(k);
    out += ',';
    out += fmt_g(res);
    out += '\n';
  }
  return out;
}

}  // namespace iso3
