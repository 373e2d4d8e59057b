#include "iso3/herpoly.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace iso3 {

void HerPoly::add_term(int a, int b, const Mat& block) {
  if (block.rows() != block.cols()) throw std::invalid_argument("hpoly: blocks must be square");
  if (terms.empty() && size == 1) size = block.rows();
  if (block.rows() != size) throw std::invalid_argument("hpoly: mixed block sizes");
  auto key = std::make_pair(a, b);
  auto it = terms.find(key);
  if (it == terms.end())
    terms.emplace(key, block);
  else
    it->second += block;
  it = terms.find(key);
  if (it->second.norm() == 0.0) terms.erase(it);
}

int HerPoly::degree() const {
  int deg = 0;
  for (const auto& [ab, blk] : terms)
    deg = std::max({deg, std::abs(ab.first), std::abs(ab.second)});
  return deg;
}

// ---------------------------------------------------------------------------
// text grammar

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;

  void ws() {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
  }
  bool done() {
    ws();
    return i >= s.size();
  }
  char peek() {
    ws();
    return i < s.size() ? s[i] : '\0';
  }
  char take() {
    ws();
    if (i >= s.size()) throw std::invalid_argument("hpoly parse: unexpected end of input");
    return s[i++];
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("hpoly parse: " + what + " at position " + std::to_string(i));
  }
};

double parse_real(Cursor& c) {
  c.ws();
  size_t start = c.i;
  if (c.i < c.s.size() && (c.s[c.i] == '+' || c.s[c.i] == '-')) ++c.i;
  bool digits = false;
  while (c.i < c.s.size() && (std::isdigit((unsigned char)c.s[c.i]) || c.s[c.i] == '.')) {
    digits = true;
    ++c.i;
  }
  if (c.i < c.s.size() && (c.s[c.i] == 'e' || c.s[c.i] == 'E')) {
    size_t mark = c.i++;
    if (c.i < c.s.size() && (c.s[c.i] == '+' || c.s[c.i] == '-')) ++c.i;
    if (c.i < c.s.size() && std::isdigit((unsigned char)c.s[c.i])) {
      while (c.i < c.s.size() && std::isdigit((unsigned char)c.s[c.i])) ++c.i;
    } else {
      c.i = mark;  // the 'e' was not an exponent
    }
  }
  if (!digits) c.fail("expected a number");
  return std::stod(c.s.substr(start, c.i - start));
}

// one complex literal: 1.5, -2, 3i, 1+2i, -1-0.5i, i, -i
cx parse_cnum(Cursor& c) {
  auto one_part = [&](double* val, bool* imag) {
    c.ws();
    double sign = 1.0;
    if (c.peek() == '+' || c.peek() == '-') sign = (c.take() == '-') ? -1.0 : 1.0;
    c.ws();
    if (c.i < c.s.size() && c.s[c.i] == 'i') {
      ++c.i;
      *val = sign;
      *imag = true;
      return;
    }
    *val = sign * parse_real(c);
    *imag = false;
    if (c.i < c.s.size() && c.s[c.i] == 'i') {
      ++c.i;
      *imag = true;
    }
  };
  double v = 0.0;
  bool im = false;
  one_part(&v, &im);
  cx z = im ? cx(0.0, v) : cx(v, 0.0);
  c.ws();
  if (c.peek() == '+' || c.peek() == '-') {
    size_t mark = c.i;
    double v2 = 0.0;
    bool im2 = false;
    one_part(&v2, &im2);
    if (im2 == im) {  // "1+2" is two terms, not one literal; back out
      c.i = mark;
      return z;
    }
    z += im2 ? cx(0.0, v2) : cx(v2, 0.0);
  }
  return z;
}

Mat parse_block(Cursor& c) {
  if (c.take() != '[') c.fail("expected '['");
  std::vector<std::vector<cx>> rows;
  while (true) {
    if (c.take() != '[') c.fail("expected '[' opening a row");
    std::vector<cx> row;
    while (true) {
      row.push_back(parse_cnum(c));
      char ch = c.take();
      if (ch == ']') break;
      if (ch != ',') c.fail("expected ',' or ']' in a row");
    }
    rows.push_back(std::move(row));
    char ch = c.take();
    if (ch == ']') break;
    if (ch != ',') c.fail("expected ',' or ']' after a row");
  }
  const size_t n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n) throw std::invalid_argument("hpoly parse: block is not square");
  Mat m(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

int parse_exponent(Cursor& c) {
  if (c.peek() != '^') return 1;
  c.take();
  c.ws();
  double sign = 1.0;
  if (c.peek() == '-') {
    c.take();
    sign = -1.0;
  }
  const double v = parse_real(c);
  if (v != std::floor(v)) c.fail("exponent must be an integer");
  return (int)(sign * v);
}

struct RawTerm {
  int a = 0, b = 0;
  Mat block;    // empty when scalar
  cx scalar{1.0, 0.0};
  bool has_block = false;
};

RawTerm parse_term(Cursor& c) {
  RawTerm t;
  bool any = false;
  char ch = c.peek();
  if (ch == '[') {
    t.block = parse_block(c);
    t.has_block = true;
    any = true;
  } else if (std::isdigit((unsigned char)ch) || ch == '.') {
    t.scalar = parse_real(c);
    any = true;
  }
  if (c.peek() == 'y') {
    c.take();
    t.a = parse_exponent(c);
    any = true;
  }
  if (c.peek() == 'x') {
    c.take();
    t.b = parse_exponent(c);
    any = true;
  }
  if (!any) c.fail("expected a term");
  return t;
}

void fmt_real(std::string& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void fmt_cnum(std::string& out, const cx& z) {
  if (z.imag() == 0.0) {
    fmt_real(out, z.real());
  } else if (z.real() == 0.0) {
    fmt_real(out, z.imag());
    out += 'i';
  } else {
    fmt_real(out, z.real());
    if (z.imag() >= 0.0) out += '+';
    fmt_real(out, z.imag());
    out += 'i';
  }
}

}  // namespace

HerPoly parse_hpoly(const std::string& text) {
  Cursor c{text};
  std::vector<std::pair<double, RawTerm>> raw;
  double sign = 1.0;
  if (c.peek() == '+' || c.peek() == '-') sign = (c.take() == '-') ? -1.0 : 1.0;
  while (true) {
    raw.emplace_back(sign, parse_term(c));
    if (c.done()) break;
    char ch = c.take();
    if (ch == '+')
      sign = 1.0;
    else if (ch == '-')
      sign = -1.0;
    else
      c.fail("expected '+' or '-' between terms");
  }

  Eigen::Index size = 1;
  for (const auto& [sg, t] : raw)
    if (t.has_block) {
      if (size != 1 && t.block.rows() != size)
        throw std::invalid_argument("hpoly parse: mixed block sizes");
      size = t.block.rows();
    }

  HerPoly p;
  p.size = size;
  for (const auto& [sg, t] : raw) {
    Mat blk;
    if (t.has_block)
      blk = sg * t.block;
    else
      blk = (sg * t.scalar) * Mat::Identity(size, size);
    if (blk.rows() != size) throw std::invalid_argument("hpoly parse: mixed block sizes");
    p.add_term(t.a, t.b, blk);
  }
  return p;
}

std::string print_hpoly(const HerPoly& p) {
  if (p.terms.empty()) return "0 y^0 x^0";
  std::string out;
  bool first = true;
  for (const auto& [ab, blk] : p.terms) {
    const auto [a, b] = ab;
    // scalar real blocks print as plain numbers; everything else as a block
    bool scalar_real = (p.size == 1 && blk(0, 0).imag() == 0.0);
    double sval = scalar_real ? blk(0, 0).real() : 0.0;

    std::string body;
    bool negative = false;
    if (scalar_real) {
      negative = sval < 0.0;
      const double mag = std::abs(sval);
      if (mag != 1.0 || (a == 0 && b == 0)) fmt_real(body, mag);
    } else {
      body += "[";
      for (Eigen::Index i = 0; i < p.size; ++i) {
        if (i) body += ",";
        body += "[";
        for (Eigen::Index j = 0; j < p.size; ++j) {
          if (j) body += ",";
          fmt_cnum(body, blk(i, j));
        }
        body += "]";
      }
      body += "]";
    }
    if (a != 0 || b != 0) {
      if (!body.empty()) body += " ";
      if (a != 0) body += (a == 1) ? "y" : ("y^" + std::to_string(a));
      if (a != 0 && b != 0) body += " ";
      if (b != 0) body += (b == 1) ? "x" : ("x^" + std::to_string(b));
    }
    if (first) {
      out += negative ? "-" : "";
      out += body;
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

nlohmann::json hpoly_to_json(const HerPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [ab, blk] : p.terms) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.size; ++i) {
      nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
      for (Eigen::Index j = 0; j < p.size; ++j) {
        rr.push_back(blk(i, j).real());
        ir.push_back(blk(i, j).imag());
      }
      re.push_back(std::move(rr));
      im.push_back(std::move(ir));
    }
    terms.push_back({{"a", ab.first}, {"b", ab.second}, {"re", std::move(re)}, {"im", std::move(im)}});
  }
  return {{"size", p.size}, {"terms", std::move(terms)}};
}

HerPoly hpoly_from_json(const nlohmann::json& j) {
  HerPoly p;
  p.size = j.at("size").get<Eigen::Index>();
  for (const auto& t : j.at("terms")) {
    Mat blk(p.size, p.size);
    for (Eigen::Index i = 0; i < p.size; ++i)
      for (Eigen::Index k = 0; k < p.size; ++k)
        blk(i, k) = cx(t.at("re")[i][k].get<double>(), t.at("im")[i][k].get<double>());
    p.add_term(t.at("a").get<int>(), t.at("b").get<int>(), blk);
  }
  return p;
}

HerPoly hpoly_add(const HerPoly& p, const HerPoly& q) {
  if (p.size != q.size) throw std::invalid_argument("hpoly_add: size mismatch");
  HerPoly r = p;
  for (const auto& [ab, blk] : q.terms) r.add_term(ab.first, ab.second, blk);
  return r;
}

HerPoly hpoly_scale(const HerPoly& p, cx factor) {
  HerPoly r;
  r.size = p.size;
  if (factor == cx(0.0, 0.0)) return r;
  for (const auto& [ab, blk] : p.terms) r.add_term(ab.first, ab.second, factor * blk);
  return r;
}

HerPoly shift_hpoly(const HerPoly& p, int j, int k) {
  HerPoly r;
  r.size = p.size;
  for (const auto& [ab, blk] : p.terms) r.add_term(ab.first + j, ab.second + k, blk);
  return r;
}

HerPoly symmetrize(const HerPoly& p) {
  HerPoly r;
  r.size = p.size;
  for (const auto& [ab, blk] : p.terms)
    if (ab.first == ab.second) r.add_term(ab.first, ab.second, blk);
  return r;
}

bool is_hermitian_symmetric(const HerPoly& p, double tol) {
  for (const auto& [ab, blk] : p.terms) {
    auto it = p.terms.find({ab.second, ab.first});
    if (it == p.terms.end()) return false;
    if ((it->second - blk.adjoint()).norm() > tol * std::max(1.0, blk.norm())) return false;
  }
  return true;
}

Mat eval_hpoly(const HerPoly& p, const OperatorMatrix& t) {
  const Eigen::Index d = t.dim();
  Mat acc = Mat::Zero(p.size * d, p.size * d);
  for (const auto& [ab, blk] : p.terms) {
    const Mat part = matpow(t.a, ab.first).adjoint() * matpow(t.a, ab.second);
    acc += Eigen::kroneckerProduct(blk, part);
  }
  return acc;
}

OperatorMatrix tensor_cyclic_shift(const OperatorMatrix& t, int m) {
  if (m < 2) throw std::invalid_argument("tensor_cyclic_shift: m must be >= 2");
  Mat s = Mat::Zero(m, m);
  for (int j = 0; j < m; ++j) s((j + 1) % m, j) = 1.0;
  return OperatorMatrix(Eigen::kroneckerProduct(t.a, s), t.tol);
}

double average_symmetrization_check(const HerPoly& p, const OperatorMatrix& t, int m) {
  if (m <= 2 * p.degree())
    throw std::invalid_argument(
        "average_symmetrization_check: need m > 2*degree for exact root-of-unity averaging");
  const Eigen::Index d = t.dim();
  Mat acc = Mat::Zero(p.size * d, p.size * d);
  for (int k = 0; k < m; ++k) {
    const cx w = std::polar(1.0, 2.0 * M_PI * k / m);
    acc += eval_hpoly(p, OperatorMatrix(w * t.a, t.tol));
  }
  acc /= double(m);
  return opnorm(acc - eval_hpoly(symmetrize(p), t));
}

std::vector<std::pair<int, double>> fejer_pairing_check(const HerPoly& p,
                                                        const OperatorMatrix& t, int n_max) {
  const Eigen::Index d = t.dim();
  const Mat exact = eval_hpoly(p, t);
  std::vector<std::pair<int, double>> table;
  for (int n = 1; n <= n_max; ++n) {
    Mat acc = Mat::Zero(p.size * d, p.size * d);
    for (const auto& [ab, blk] : p.terms) {
      const double w = std::max(2.0 * n + 1.0 - std::abs(ab.first - ab.second), 0.0) /
                       (2.0 * n + 1.0);
      if (w == 0.0) continue;
      const Mat part = matpow(t.a, ab.first).adjoint() * matpow(t.a, ab.second);
      acc += w * Eigen::kroneckerProduct(blk, part);
    }
    table.emplace_back(n, opnorm(acc - exact));
  }
  return table;
}

}  // namespace iso3
