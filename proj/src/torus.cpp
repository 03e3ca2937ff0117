#include "nbu/torus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include <json.hpp>

namespace nbu {

AffineTorusMap::AffineTorusMap(IntMatrix lin, RationalVector t)
    : linear(std::move(lin)), translation(std::move(t)) {
  if (!linear.is_square()) throw DimensionError("affine map needs a square linear part");
  if (translation.dimension() != linear.rows()) throw DimensionError("translation has the wrong length");
}

AffineTorusMap AffineTorusMap::linear_map(IntMatrix lin) {
  const std::size_t n = lin.rows();
  return AffineTorusMap(std::move(lin), RationalVector(n, Rational(0)));
}

RationalVector AffineTorusMap::apply_lift(std::span<const Rational> x) const {
  RationalVector y = linear * x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += translation[i];
  return y;
}

TorusPoint AffineTorusMap::operator()(const TorusPoint& x) const {
  return TorusPoint(apply_lift(x.coords()));
}

AffineTorusMap compose(const AffineTorusMap& f, const AffineTorusMap& g) {
  if (f.dimension() != g.dimension()) throw DimensionError("cannot compose maps of different dimension");
  RationalVector t = f.linear * std::span<const Rational>(g.translation.coords());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] += f.translation[i];
  return AffineTorusMap(f.linear * g.linear, std::move(t));
}

namespace {

struct TagInfo {
  InvolutionTag tag;
  std::string_view id;
  std::string_view short_name;
};

constexpr std::array<TagInfo, 12> kTags{{
    {InvolutionTag::t1_antipodal, "t1.antipodal", "antipodal"},
    {InvolutionTag::t2_tau1, "t2.tau1", "tau1"},
    {InvolutionTag::t2_tau2, "t2.tau2", "tau2"},
    {InvolutionTag::t3_h1, "t3.h1", "h1"},
    {InvolutionTag::t3_h2, "t3.h2", "h2"},
    {InvolutionTag::t3_h3, "t3.h3", "h3"},
    {InvolutionTag::t3_h4, "t3.h4", "h4"},
    {InvolutionTag::tn_tau1, "tn.tau1", "tau1"},
    {InvolutionTag::tn_tau2, "tn.tau2", "tau2"},
    {InvolutionTag::tn_tau3, "tn.tau3", "tau3"},
    {InvolutionTag::tn_tau4, "tn.tau4", "tau4"},
    {InvolutionTag::custom, "custom", "custom"},
}};

bool tag_fits_dimension(InvolutionTag tag, std::size_t dim) {
  switch (tag) {
    case InvolutionTag::t1_antipodal: return dim == 1;
    case InvolutionTag::t2_tau1:
    case InvolutionTag::t2_tau2: return dim == 2;
    case InvolutionTag::t3_h1:
    case InvolutionTag::t3_h2:
    case InvolutionTag::t3_h3:
    case InvolutionTag::t3_h4: return dim == 3;
    case InvolutionTag::tn_tau1:
    case InvolutionTag::tn_tau2:
    case InvolutionTag::tn_tau3:
    case InvolutionTag::tn_tau4: return dim > 3;
    case InvolutionTag::custom: return dim > 0;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

Integer parse_integer(std::string_view text) {
  std::string s(trim(text));
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  const bool ok = !s.empty() &&
                  std::all_of(s.begin() + (s.front() == '-' ? 1 : 0), s.end(),
                              [](unsigned char c) { return std::isdigit(c); }) &&
                  s != "-";
  if (!ok) throw ParseError("not an integer: '" + std::string(text) + "'");
  return Integer(s, 10);
}

Rational parse_rational(std::string_view text) {
  const auto t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(t));
  const Integer num = parse_integer(t.substr(0, slash));
  const Integer den = parse_integer(t.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Integer json_integer(const nlohmann::json& v) {
  if (v.is_number_integer()) return Integer(v.dump(), 10);
  if (v.is_string()) return parse_integer(v.get<std::string>());
  throw ParseError("matrix entry is not an integer: " + v.dump());
}

}  // namespace

std::string_view tag_id(InvolutionTag tag) {
  for (const auto& info : kTags)
    if (info.tag == tag) return info.id;
  return "custom";
}

std::string_view to_string(Orientation o) {
  return o == Orientation::preserves ? "preserves" : "reverses";
}

std::string_view to_string(InvolutionVerdict v) {
  switch (v) {
    case InvolutionVerdict::ok: return "ok";
    case InvolutionVerdict::not_involution: return "not_involution";
    case InvolutionVerdict::not_free: return "not_free";
  }
  return "?";
}

InvolutionTag resolve_tag(std::size_t dim, std::string_view name) {
  name = trim(name);
  for (const auto& info : kTags) {
    if (info.tag == InvolutionTag::custom) continue;
    if ((info.id == name || info.short_name == name) && tag_fits_dimension(info.tag, dim)) return info.tag;
  }
  for (const auto& info : kTags)
    if (info.id == name || info.short_name == name)
      throw InvolutionError("involution '" + std::string(name) + "' is not defined on T^" + std::to_string(dim));
  throw InvolutionError("unknown involution '" + std::string(name) + "'");
}

InvolutionVerdict validate_free_involution(const AffineTorusMap& s) {
  const std::size_t n = s.dimension();
  const AffineTorusMap twice = compose(s, s);
  if (!(twice.linear == IntMatrix::identity(n)) ||
      !std::all_of(twice.translation.coords().begin(), twice.translation.coords().end(),
                   [](const Rational& q) { return q == 0; }))
    return InvolutionVerdict::not_involution;
  // Fixed points: (S - I) x = -t (mod 1).
  RationalVector rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -s.translation[i];
  if (!solve_torus_congruence(s.linear - IntMatrix::identity(n), rhs).empty())
    return InvolutionVerdict::not_free;
  return InvolutionVerdict::ok;
}

FreeInvolution custom_involution(const AffineTorusMap& s) {
  const auto verdict = validate_free_involution(s);
  if (verdict != InvolutionVerdict::ok)
    throw InvolutionError("map is not a free involution (" + std::string(to_string(verdict)) + ")");
  FreeInvolution inv;
  inv.map = s;
  inv.tag = InvolutionTag::custom;
  inv.orientation = determinant(s.linear) > 0 ? Orientation::preserves : Orientation::reverses;
  return inv;
}

FreeInvolution catalog_involution(std::size_t dim, InvolutionTag tag) {
  if (tag == InvolutionTag::custom) throw InvolutionError("'custom' is not a catalog involution");
  if (!tag_fits_dimension(tag, dim))
    throw InvolutionError(std::string(tag_id(tag)) + " is not defined on T^" + std::to_string(dim));

  IntMatrix s = IntMatrix::identity(dim);
  RationalVector t(dim, Rational(0));
  const std::size_t last = dim - 1;
  switch (tag) {
    case InvolutionTag::t1_antipodal:
      t[0] = Rational(1, 2);
      break;
    case InvolutionTag::t2_tau1:
      t[0] = Rational(1, 2);
      break;
    case InvolutionTag::t2_tau2:
    case InvolutionTag::t3_h2:
    case InvolutionTag::tn_tau2:
      for (std::size_t i = 0; i < last; ++i) s(i, i) = -1;
      t[last] = Rational(1, 2);
      break;
    case InvolutionTag::t3_h1:
    case InvolutionTag::tn_tau1:
      t[last] = Rational(1, 2);
      break;
    case InvolutionTag::t3_h3:
      s(1, 1) = -1;
      t[last] = Rational(1, 2);
      break;
    case InvolutionTag::tn_tau3:
      s(dim - 2, dim - 2) = -1;
      t[last] = Rational(1, 2);
      break;
    case InvolutionTag::t3_h4:
    case InvolutionTag::tn_tau4:
      s(0, 1) = 1;
      s(1, 1) = -1;
      t[last] = Rational(1, 2);
      break;
    case InvolutionTag::custom:
      break;
  }
  FreeInvolution inv = custom_involution(AffineTorusMap(std::move(s), std::move(t)));
  inv.tag = tag;
  return inv;
}

FreeInvolution catalog_involution(std::size_t dim, std::string_view name) {
  return catalog_involution(dim, resolve_tag(dim, name));
}

FreeInvolution h_family_involution(int i, int j) {
  if (i < 0 || i > 1 || j < 0 || j > 1) throw InvolutionError("h-family indices must be 0 or 1");
  IntMatrix s = IntMatrix::identity(3);
  s(0, 1) = i * j;
  s(1, 1) = i == 0 ? 1 : -1;
  FreeInvolution inv = custom_involution(AffineTorusMap(std::move(s), {Rational(0), Rational(0), Rational(1, 2)}));
  switch (2 * i + i * j + 1) {
    case 1: inv.tag = InvolutionTag::t3_h1; break;
    case 3: inv.tag = InvolutionTag::t3_h3; break;
    default: inv.tag = InvolutionTag::t3_h4; break;
  }
  return inv;
}

IntMatrix parse_matrix(std::string_view text, std::size_t dim) {
  const auto t = trim(text);
  std::vector<std::vector<Integer>> rows;
  if (!t.empty() && t.front() == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed JSON matrix: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("JSON matrix must be an array of arrays");
    for (const auto& row : j) {
      if (!row.is_array()) throw ParseError("JSON matrix must be an array of arrays");
      std::vector<Integer> r;
      for (const auto& v : row) r.push_back(json_integer(v));
      rows.push_back(std::move(r));
    }
  } else {
    if (t.empty()) throw ParseError("empty matrix text");
    for (auto row : split(t, ';')) {
      std::vector<Integer> r;
      for (auto entry : split(row, ',')) r.push_back(parse_integer(entry));
      rows.push_back(std::move(r));
    }
  }
  if (dim == 0) dim = rows.size();
  if (rows.size() != dim) throw ParseError("matrix must have " + std::to_string(dim) + " rows");
  IntMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (rows[i].size() != dim) throw ParseError("matrix row " + std::to_string(i + 1) + " must have " + std::to_string(dim) + " entries");
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RationalVector parse_rational_vector(std::string_view text, std::size_t dim) {
  const auto t = trim(text);
  RationalVector v;
  if (!t.empty() && t.front() == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed JSON vector: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("JSON vector must be an array");
    for (const auto& e : j) {
      if (e.is_string()) v.push_back(parse_rational(e.get<std::string>()));
      else if (e.is_number_integer()) v.push_back(Rational(json_integer(e)));
      else throw ParseError("vector entry must be an integer or a \"p/q\" string");
    }
  } else {
    if (t.empty()) throw ParseError("empty vector text");
    for (auto entry : split(t, ',')) v.push_back(parse_rational(entry));
  }
  if (dim != 0 && v.size() != dim) throw ParseError("vector must have " + std::to_string(dim) + " entries");
  return v;
}

}  // namespace nbu
