// Explicit maps in the homotopy class of M whose coincidences with f o s are
// isolated, nondegenerate and attain NBU.
//
// Every construction works in a frame U (unimodular) on the target side:
// the perturbation e is chosen as U^-1 e~, so that the coincidence equation
// reads (U L x - U A t)_i + e~_i(x) - e~_i(s x) = 0 (mod 1) row by row.

#include <algorithm>
#include <cstdlib>
#include <optional>

#include "nbu/closed_form.hpp"
#include "nbu/coincidence.hpp"

namespace nbu {

namespace {

// A term in the U-frame: row `row` gets amplitude/n0 * sin(pi m frac(x_source)).
struct FrameTerm {
  std::size_t row;
  std::size_t source;
  unsigned half_frequency;
};

std::vector<PerturbationTerm> to_actual(const IntMatrix& u, std::span<const FrameTerm> frame, unsigned n0) {
  const IntMatrix inv = unimodular_inverse(u);
  std::vector<PerturbationTerm> out;
  for (const auto& ft : frame)
    for (std::size_t i = 0; i < inv.rows(); ++i) {
      if (inv(i, ft.row) == 0) continue;
      PerturbationTerm t;
      t.target = i;
      t.source = ft.source;
      t.amplitude = Rational(inv(i, ft.row), n0);
      t.amplitude.canonicalize();
      t.half_frequency = ft.half_frequency;
      out.push_back(t);
    }
  return out;
}

// S = diag(-1, ..., -1, 1), t = (0, ..., 0, 1/2).
bool is_reflection_form(const FreeInvolution& s) {
  const std::size_t n = s.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const long want = i != j ? 0 : (i + 1 == n ? 1 : -1);
      if (s.linear()(i, j) != want) return false;
    }
    if (s.translation()[i] != (i + 1 == n ? Rational(1, 2) : Rational(0))) return false;
  }
  return true;
}

// Axis z with s(x)_z = x_z + 1/2.
std::optional<std::size_t> translation_axis(const FreeInvolution& s) {
  const std::size_t n = s.dimension();
  for (std::size_t z = 0; z < n; ++z) {
    bool fixed = s.translation()[z] == Rational(1, 2);
    for (std::size_t j = 0; j < n && fixed; ++j) fixed = s.linear()(z, j) == (j == z ? 1 : 0);
    if (fixed) return z;
  }
  return std::nullopt;
}

// Row operations making U * B anti-triangular: row p is supported on columns
// 0..n-2-p with a nonzero entry in column n-2-p, and the last row is zero.
IntMatrix anti_triangular_frame(IntMatrix b) {
  const std::size_t n = b.rows();
  IntMatrix u = IntMatrix::identity(n);
  for (std::size_t j = n - 1; j-- > 0;) {
    const std::size_t p = n - 2 - j;
    for (;;) {
      std::size_t piv = n;
      for (std::size_t r = p; r < n; ++r)
        if (b(r, j) != 0 && (piv == n || abs(b(r, j)) < abs(b(piv, j)))) piv = r;
      if (piv == n) throw UnsupportedRealizer("rank-deficient block in the chain construction");
      if (piv != p) {
        b.swap_rows(p, piv);
        u.swap_rows(p, piv);
      }
      bool done = true;
      for (std::size_t r = p + 1; r < n; ++r) {
        if (b(r, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), b(r, j).get_mpz_t(), b(p, j).get_mpz_t());
        b.add_row_multiple(r, p, -q);
        u.add_row_multiple(r, p, -q);
        if (b(r, j) != 0) done = false;
      }
      if (done) break;
    }
  }
  return u;
}

std::string closed_branch(const IntMatrix& m, const FreeInvolution& s) {
  try {
    return closed_form_nbu(m, s).branch;
  } catch (const std::invalid_argument&) {
    return "none";
  }
}

}  // namespace

Realizer build_realizer(const IntMatrix& m, const FreeInvolution& s, unsigned n0) {
  const std::size_t n = s.dimension();
  if (!m.is_square() || m.rows() != n) throw DimensionError("matrix and involution dimensions differ");
  Realizer out;
  out.branch = closed_branch(m, s);
  out.map.base = AffineTorusMap::linear_map(m);
  out.max_denominator = 2;

  if (n == 1) {
    out.n0 = n0 ? n0 : 3;
    if (s.translation()[0] != Rational(1, 2)) throw UnsupportedRealizer("T^1 involution must be x + 1/2");
    if (mpz_even_p(m(0, 0).get_mpz_t())) {
      out.map.terms.push_back({0, 0, Rational(1, out.n0), 2, Rational(0)});
      out.construction = "antipodal.epsilon";
    } else {
      out.construction = "antipodal.base";
    }
    return out;
  }

  out.n0 = n0 ? n0 : std::max(5u, 4 * out.max_denominator);
  const IntMatrix l = coincidence_matrix(m, s);
  const RationalVector at = m * s.translation();

  if (is_reflection_form(s)) {
    const IntMatrix b = m.column_block(0, n - 1);
    if (n > 3) {
      if (!is_g_family(m)) throw UnsupportedRealizer("no realizer outside the g-family for this involution when n > 3");
      out.map.terms.push_back({n - 1, n - 1, Rational(1, out.n0), 2, Rational(0)});
      out.construction = "g_family.literal";
      return out;
    }
    if (rank(b) == n - 1) {
      const IntMatrix u = anti_triangular_frame(b);
      std::vector<FrameTerm> frame;
      for (std::size_t p = 0; p < n; ++p) frame.push_back({p, n - 1 - p, 2});
      out.map.terms = to_actual(u, frame, out.n0);
      out.construction = "chain";
      return out;
    }
  }

  // Rows of U L that vanish carry only constants; nonintegral constants there
  // already rule out coincidences, otherwise two non-vanishing terms with no
  // common zero do.
  const SmithDecomposition snf = smith_normal_form(l);
  const RationalVector c = snf.left * std::span<const Rational>(at);
  for (std::size_t i = snf.rank; i < n; ++i)
    if (!is_integral(c[i])) {
      out.construction = "parity_obstruction";
      return out;
    }
  const auto z = translation_axis(s);
  if (n - snf.rank < 2 || !z) throw UnsupportedRealizer("no realizer construction for this involution");
  const FrameTerm frame[] = {{snf.rank, *z, 2}, {snf.rank + 1, *z, 1}};
  out.map.terms = to_actual(snf.left, frame, out.n0);
  out.construction = "zero_rows";
  return out;
}

}  // namespace nbu
