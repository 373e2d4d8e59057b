#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "iso3/factorization.hpp"
#include "iso3/gns.hpp"
#include "iso3/hereditary.hpp"
#include "iso3/lift.hpp"
#include "iso3/symmetric3.hpp"

// JSON report builders for the CLI. ordered_json keeps key order fixed so
// repeated runs with the same inputs produce byte-identical files.

namespace iso3 {

using ojson = nlohmann::ordered_json;

ojson report_header(const std::string& kind);

ojson check_json(const OperatorMatrix& t);
ojson fc_report_json(const FcReport& r);
ojson factor_json(const FejerRieszResult& r);
ojson dilation_json(const GnsDilation& d);
ojson lifting_json(const LiftingCertificate& cert, const LiftReport& rep);
ojson trim_json(const TrimResult& r);
ojson sym_check_json(const SymCheck& r);
ojson sym_lifting_json(const SymLifting& r);

std::string scan_csv(const QuadraticPencil& p, double lo, double hi, int steps);
std::string residual_csv(const std::vector<std::pair<int, double>>& rows);

}  // namespace iso3
