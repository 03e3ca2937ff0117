#include "nbu/coincidence.hpp"

#include <cmath>
#include <map>

namespace nbu {

std::string_view to_string(ClassKind k) { return k == ClassKind::single ? "single" : "double"; }

std::string_view to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::exact_affine: return "exact_affine";
    case Method::numeric_oracle: return "numeric_oracle";
  }
  return "?";
}

IntMatrix coincidence_matrix(const IntMatrix& a, const FreeInvolution& s) {
  const std::size_t n = s.dimension();
  if (!a.is_square() || a.rows() != n) throw DimensionError("matrix and involution dimensions differ");
  return a * (IntMatrix::identity(n) - s.linear());
}

double torus_distance(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fabs(a[i] - b[i]);
    d -= std::floor(d);
    worst = std::max(worst, std::min(d, 1.0 - d));
  }
  return worst;
}

SolutionSet coincidence_set_affine(const AffineTorusMap& f, const FreeInvolution& s) {
  // f(x) - f(Sx + t) = A(I - S)x - A t; the translation of f cancels.
  const IntMatrix l = coincidence_matrix(f.linear, s);
  return solve_torus_congruence(l, f.linear * s.translation());
}

namespace {

// k = L x - A t for the lift x in [0, 1)^n; integral exactly on coincidences.
RationalVector lift_difference(const TorusPoint& x, const IntMatrix& a, const FreeInvolution& s, const IntMatrix& l) {
  RationalVector k = l * std::span<const Rational>(x.coords());
  const RationalVector at = a * s.translation();
  for (std::size_t i = 0; i < k.size(); ++i) k[i] -= at[i];
  return k;
}

std::vector<double> to_double(const RationalVector& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

}  // namespace

ClassId usual_class_of(const TorusPoint& x, const AffineTorusMap& f, const FreeInvolution& s) {
  const IntMatrix l = coincidence_matrix(f.linear, s);
  const RationalVector k = lift_difference(x, f.linear, s, l);
  if (!is_integral(k)) throw NumericError(NumericError::Kind::not_a_coincidence, "not a coincidence: " + to_string(x.coords()));
  IntegerVector ki(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) ki[i] = k[i].get_num();
  return cokernel_class(smith_normal_form(l), ki);
}

ClassId usual_class_of(const TorusPoint& x, const PerturbedMap& f, const FreeInvolution& s) {
  const IntMatrix l = coincidence_matrix(f.base.linear, s);
  const RationalVector k = lift_difference(x, f.base.linear, s, l);
  // Perturbation terms are periodic, so evaluating them at any lift of x and
  // of s(x) gives the same difference.
  const std::vector<double> xd = to_double(x.coords());
  const std::vector<double> sxd = to_double(s.map(x).coords());
  std::vector<double> e(k.size(), 0.0);
  for (const auto& term : f.terms) e[term.target] += term.value(xd[term.source]) - term.value(sxd[term.source]);

  IntegerVector ki(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double total = k[i].get_d() + e[i];
    const double r = std::nearbyint(total);
    if (std::fabs(total - r) > 1e-6)
      throw NumericError(NumericError::Kind::not_a_coincidence, "not a coincidence: " + to_string(x.coords()));
    ki[i] = static_cast<long>(r);
  }
  return cokernel_class(smith_normal_form(l), ki);
}

namespace {

std::size_t partner_of(std::span<const CoincidencePoint> points, std::size_t i, const FreeInvolution& s,
                       double radius) {
  const std::size_t n = s.dimension();
  std::vector<double> sx(n);
  for (std::size_t r = 0; r < n; ++r) {
    double v = s.translation()[r].get_d();
    for (std::size_t c = 0; c < n; ++c) v += s.linear()(r, c).get_d() * points[i].coords[c];
    sx[r] = v - std::floor(v);
  }
  for (std::size_t j = 0; j < points.size(); ++j)
    if (j != i && torus_distance(points[j].coords, sx) < radius) return j;
  return points.size();
}

bool mod2_branch(std::size_t n, Orientation o) {
  const bool reverses = o == Orientation::reverses;
  return (reverses && n % 2 == 0) || (!reverses && n % 2 == 1);
}

}  // namespace

std::vector<BUClass> bu_pairing(std::span<const CoincidencePoint> points, const FreeInvolution& s, double radius) {
  for (const auto& p : points)
    if (!p.usual_class) throw NumericError(NumericError::Kind::missing_index, "point without a usual class");

  std::vector<bool> used(points.size(), false);
  std::vector<BUClass> classes;
  std::map<std::pair<ClassId, ClassId>, std::size_t> by_key;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (used[i]) continue;
    const std::size_t j = partner_of(points, i, s, radius);
    if (j == points.size() || used[j])
      throw NumericError(NumericError::Kind::not_closed, "coincidence set is not closed under the involution");
    used[i] = used[j] = true;
    const ClassId& ci = *points[i].usual_class;
    const ClassId& cj = *points[j].usual_class;
    auto key = ci < cj ? std::make_pair(ci, cj) : std::make_pair(cj, ci);
    auto [it, fresh] = by_key.try_emplace(key, classes.size());
    if (fresh) {
      BUClass c;
      c.kind = ci == cj ? ClassKind::single : ClassKind::double_class;
      c.usual_classes = ci == cj ? std::vector<ClassId>{ci} : std::vector<ClassId>{ci, cj};
      classes.push_back(std::move(c));
    }
    BUClass& c = classes[it->second];
    if (c.kind == ClassKind::double_class && *points[i].usual_class != c.usual_classes[0])
      c.pairs.emplace_back(j, i);
    else
      c.pairs.emplace_back(i, j);
  }
  return classes;
}

Integer pseudo_index(const BUClass& c, std::span<const CoincidencePoint> points, std::size_t n, Orientation o) {
  auto index = [&](std::size_t k) {
    if (points[k].local_index == 0) throw NumericError(NumericError::Kind::missing_index, "missing local index");
    return points[k].local_index;
  };
  long first = 0, all = 0;
  for (const auto& [x, sx] : c.pairs) {
    first += index(x);
    all += index(x) + index(sx);
  }
  if (mod2_branch(n, o)) {
    if (c.kind == ClassKind::single) return Integer(((first % 2) + 2) % 2);
    return Integer(std::labs(first));
  }
  if (c.kind == ClassKind::single) {
    if (all % 2 != 0)
      throw NumericError(NumericError::Kind::index_inconsistency, "odd index on a single class");
    return Integer(all / 2);
  }
  return Integer(first);
}

bool index_parity_check(std::span<const CoincidencePoint> points, const FreeInvolution& s, std::size_t n,
                        double radius) {
  const int sign = mod2_branch(n, s.orientation) ? -1 : 1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t j = partner_of(points, i, s, radius);
    if (j == points.size()) return false;
    if (points[i].local_index != sign * points[j].local_index) return false;
  }
  return true;
}

}  // namespace nbu
