#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "iso3/operator_matrix.hpp"

// Matrix serialization.
//
// JSON layout: {"dim": n, "re": [[...]], "im": [[...]]}, row major.
// CSV layout: one line per row, columns interleaved re,im per entry,
// printed with 17 significant digits so double round-trips are exact.

namespace iso3 {

nlohmann::json matrix_to_json(const Mat& a);
Mat matrix_from_json(const nlohmann::json& j);

std::string matrix_to_csv(const Mat& a);
Mat matrix_from_csv(const std::string& text);

// Convenience file helpers; format chosen by extension (.json / .csv).
Mat load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Mat& a);

}  // namespace iso3
