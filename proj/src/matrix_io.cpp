#include "iso3/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace iso3 {

using nlohmann::json;

nlohmann::json matrix_to_json(const Mat& a) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      rrow.push_back(a(i, j).real());
      irow.push_back(a(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  if (a.rows() == a.cols()) return json{{"dim", a.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
  // rectangular blocks (embeddings, certificates) carry explicit rows/cols
  return json{{"rows", a.rows()}, {"cols", a.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Mat matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("re") || !j.contains("im"))
    throw std::invalid_argument("matrix json: needs keys re, im");
  Eigen::Index rows, cols;
  if (j.contains("dim")) {
    rows = cols = j.at("dim").get<Eigen::Index>();
  } else if (j.contains("rows") && j.contains("cols")) {
    rows = j.at("rows").get<Eigen::Index>();
    cols = j.at("cols").get<Eigen::Index>();
  } else {
    throw std::invalid_argument("matrix json: needs key dim (or rows+cols)");
  }
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if ((Eigen::Index)re.size() != rows || (Eigen::Index)im.size() != rows)
    throw std::invalid_argument("matrix json: row count mismatch");
  Mat a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if ((Eigen::Index)re[i].size() != cols || (Eigen::Index)im[i].size() != cols)
      throw std::invalid_argument("matrix json: column count mismatch");
    for (Eigen::Index k = 0; k < cols; ++k)
      a(i, k) = cx(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return a;
}

std::string matrix_to_csv(const Mat& a) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", a(i, j).real(), a(i, j).imag());
      if (j) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Mat matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    rows.push_back(std::move(vals));
  }
  const Eigen::Index n = (Eigen::Index)rows.size();
  if (n == 0) throw std::invalid_argument("matrix csv: empty input");
  if (rows[0].empty() || rows[0].size() % 2 != 0)
    throw std::invalid_argument("matrix csv: expected re,im interleaved values per row");
  const Eigen::Index m = (Eigen::Index)rows[0].size() / 2;
  Mat a(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((Eigen::Index)rows[i].size() != 2 * m)
      throw std::invalid_argument("matrix csv: ragged rows (re,im interleaved)");
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = cx(rows[i][2 * j], rows[i][2 * j + 1]);
  }
  return a;
}

namespace {
bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}
}  // namespace

Mat load_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  if (ends_with(path, ".csv")) return matrix_from_csv(ss.str());
  return matrix_from_json(json::parse(ss.str()));
}

void save_matrix(const std::string& path, const Mat& a) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  if (ends_with(path, ".csv"))
    f << matrix_to_csv(a);
  else
    f << matrix_to_json(a).dump(2) << '\n';
}

}  // namespace iso3
