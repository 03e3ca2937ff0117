#pragma once

// Exact integer and rational linear algebra: Smith normal form, linear
// congruences on the torus R^n / Z^n, cokernel structure.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace nbu {

using Integer = mpz_class;
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Dense integer matrix with arbitrary-precision entries, row-major.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  explicit IntMatrix(std::size_t n) : IntMatrix(n, n) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix diagonal(std::span<const Integer> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntMatrix transpose() const;
  IntMatrix column_block(std::size_t first, std::size_t count) const;
  bool is_zero() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += factor * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  /// col[dst] += factor * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  void negate_row(std::size_t r);

  /// Semicolon-separated rows of comma-separated entries, e.g. "1,0;0,2".
  std::string to_text() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);
RationalVector operator*(const IntMatrix& a, std::span<const Rational> x);

/// Exact determinant (fraction-free Bareiss elimination).
Integer determinant(const IntMatrix& a);
std::size_t rank(const IntMatrix& a);
/// Inverse of a matrix with determinant +-1; throws std::domain_error otherwise.
IntMatrix unimodular_inverse(const IntMatrix& a);

bool is_integral(const Rational& q);
bool is_integral(std::span<const Rational> v);
/// Representative of q mod 1 in [0, 1).
Rational frac(const Rational& q);
RationalVector frac(std::span<const Rational> v);

struct SmithDecomposition {
  IntMatrix left;      // U, unimodular
  IntMatrix diagonal;  // S = U * A * V
  IntMatrix right;     // V, unimodular
  std::size_t rank = 0;

  /// Diagonal entries d_1 | d_2 | ... | d_rank.
  IntegerVector factors() const;
};

/// Smith normal form. Pivots are chosen by minimal absolute value, ties broken
/// by the lowest (row, column) index, so the output is a pure function of the
/// input.
SmithDecomposition smith_normal_form(const IntMatrix& a);

/// Exact solution locus of A x = b (mod Z^n) for x in the torus.
///
/// The locus is a finite union of parallel translates of the connected
/// subtorus spanned by `subtorus_basis`. Translates are enumerated in
/// lexicographic order of their Smith-coordinate representatives.
struct SolutionSet {
  enum class Kind { empty, all, coset_union };

  Kind kind = Kind::empty;
  std::size_t dimension = 0;
  RationalVector particular;
  std::vector<RationalVector> subtorus_basis;
  std::vector<RationalVector> translates;

  std::size_t component_count() const { return translates.size(); }
  bool empty() const { return kind == Kind::empty; }
  std::size_t subtorus_dimension() const { return subtorus_basis.size(); }

  /// translates[component] + sum_i params[i] * subtorus_basis[i], reduced mod 1.
  RationalVector point(std::size_t component, std::span<const Rational> params) const;
};

/// Components are materialised eagerly; more than this many is refused.
inline constexpr std::size_t kMaxSolutionComponents = std::size_t{1} << 22;

SolutionSet solve_torus_congruence(const IntMatrix& a, std::span<const Rational> b);

/// Z^n / A Z^n as invariant factors (all >= 2) plus a free rank.
struct AbelianGroupStructure {
  IntegerVector invariant_factors;
  std::size_t free_rank = 0;

  /// Order of the group; empty when the group is infinite.
  std::optional<Integer> order() const;
};

AbelianGroupStructure cokernel(const IntMatrix& a);

/// Canonical representative of k in Z^n / A Z^n, expressed in the Smith
/// coordinates of `snf` (a decomposition of A). Torsion coordinates are
/// reduced into [0, d_i); free coordinates are kept verbatim.
IntegerVector cokernel_class(const SmithDecomposition& snf, std::span<const Integer> k);

std::string to_string(std::span<const Rational> v);

}  // namespace nbu
