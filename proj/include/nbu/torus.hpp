#pragma once

// Affine self-maps of the n-torus and the catalog of free involutions.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nbu/lattice.hpp"

namespace nbu {

class ParseError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvolutionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A point of R^n / Z^n with exact coordinates in [0, 1).
class TorusPoint {
public:
  TorusPoint() = default;
  explicit TorusPoint(RationalVector coords) : coords_(frac(coords)) {}

  std::size_t dimension() const { return coords_.size(); }
  const RationalVector& coords() const { return coords_; }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

private:
  RationalVector coords_;
};

/// x -> linear * x + translation (mod Z^n).
struct AffineTorusMap {
  IntMatrix linear;
  TorusPoint translation;

  AffineTorusMap() = default;
  AffineTorusMap(IntMatrix lin, RationalVector t);
  static AffineTorusMap linear_map(IntMatrix lin);

  std::size_t dimension() const { return linear.rows(); }
  /// Image of a lift, not reduced mod 1.
  RationalVector apply_lift(std::span<const Rational> x) const;
  TorusPoint operator()(const TorusPoint& x) const;

  friend bool operator==(const AffineTorusMap&, const AffineTorusMap&) = default;
};

/// (f o g)(x) = f(g(x)).
AffineTorusMap compose(const AffineTorusMap& f, const AffineTorusMap& g);

enum class InvolutionTag {
  t1_antipodal,
  t2_tau1,
  t2_tau2,
  t3_h1,
  t3_h2,
  t3_h3,
  t3_h4,
  tn_tau1,
  tn_tau2,
  tn_tau3,
  tn_tau4,
  custom,
};

enum class Orientation { preserves, reverses };

std::string_view tag_id(InvolutionTag tag);
std::string_view to_string(Orientation o);

/// Resolves either a full id ("t3.h2") or a short name ("h2", "tau2",
/// "antipodal") against the dimension.
InvolutionTag resolve_tag(std::size_t dim, std::string_view name);

struct FreeInvolution {
  AffineTorusMap map;
  InvolutionTag tag = InvolutionTag::custom;
  Orientation orientation = Orientation::preserves;

  std::size_t dimension() const { return map.dimension(); }
  const IntMatrix& linear() const { return map.linear; }
  const RationalVector& translation() const { return map.translation.coords(); }
};

enum class InvolutionVerdict { ok, not_involution, not_free };

std::string_view to_string(InvolutionVerdict v);

/// Exact check: s o s = id, and s(x) = x has no solution on the torus.
InvolutionVerdict validate_free_involution(const AffineTorusMap& s);

FreeInvolution catalog_involution(std::size_t dim, InvolutionTag tag);
FreeInvolution catalog_involution(std::size_t dim, std::string_view name);
/// Validates `s`; the tag is `custom` even when s coincides with a catalog entry.
FreeInvolution custom_involution(const AffineTorusMap& s);

/// The h_1, h_3, h_4 family on T^3 as x -> (x + ij*y, (-1)^i y, z + 1/2).
FreeInvolution h_family_involution(int i, int j);

/// "a,b;c,d" or a JSON array of arrays "[[a,b],[c,d]]".
IntMatrix parse_matrix(std::string_view text, std::size_t dim);
/// Comma-separated rationals "0,0,1/2" (or a JSON array of strings/numbers).
RationalVector parse_rational_vector(std::string_view text, std::size_t dim);

}  // namespace nbu
