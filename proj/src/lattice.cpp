#include "nbu/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace nbu {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Integer(0)) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged matrix literal");
    for (long v : row) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::diagonal(std::span<const Integer> entries) {
  IntMatrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::column_block(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw DimensionError("column block out of range");
  IntMatrix b(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) b(i, j) = (*this)(i, first + j);
  return b;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += factor * (*this)(src, j);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += factor * (*this)(i, src);
}

void IntMatrix::negate_row(std::size_t r) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
}

std::string IntMatrix::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << ';';
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ',';
      os << (*this)(i, j).get_str();
    }
  }
  return os.str();
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product dimension mismatch");
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix difference dimension mismatch");
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

RationalVector operator*(const IntMatrix& a, std::span<const Rational> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector dimension mismatch");
  RationalVector y(a.rows(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0) y[i] += Rational(a(i, j)) * x[j];
  return y;
}

Integer determinant(const IntMatrix& a) {
  if (!a.is_square()) throw DimensionError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m(k, k) * m(i, j) - m(i, k) * m(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = v;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

std::size_t rank(const IntMatrix& a) { return smith_normal_form(a).rank; }

IntMatrix unimodular_inverse(const IntMatrix& a) {
  if (!a.is_square()) throw DimensionError("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  // Gauss-Jordan over Q on [A | I].
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j);
    m[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) throw std::domain_error("matrix is singular");
    std::swap(m[p], m[c]);
    const Rational pivot = m[c][c];
    for (auto& v : m[c]) v /= pivot;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = 0; j < 2 * n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  IntMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& v = m[i][n + j];
      if (v.get_den() != 1) throw std::domain_error("matrix is not unimodular");
      inv(i, j) = v.get_num();
    }
  return inv;
}

bool is_integral(const Rational& q) { return mpz_divisible_p(q.get_num_mpz_t(), q.get_den_mpz_t()) != 0; }

bool is_integral(std::span<const Rational> v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return is_integral(q); });
}

Rational frac(const Rational& q) {
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  Rational r = q - Rational(fl);
  r.canonicalize();
  return r;
}

RationalVector frac(std::span<const Rational> v) {
  RationalVector out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(frac(q));
  return out;
}

IntegerVector SmithDecomposition::factors() const {
  IntegerVector f;
  for (std::size_t i = 0; i < rank; ++i) f.push_back(diagonal(i, i));
  return f;
}

namespace {

// Smallest nonzero |entry| in the trailing block starting at (t, t); ties go to
// the lowest row, then the lowest column.
bool find_pivot(const IntMatrix& d, std::size_t t, std::size_t& pi, std::size_t& pj) {
  bool found = false;
  Integer best;
  for (std::size_t i = t; i < d.rows(); ++i)
    for (std::size_t j = t; j < d.cols(); ++j) {
      if (d(i, j) == 0) continue;
      Integer v = abs(d(i, j));
      if (!found || v < best) {
        best = v;
        pi = i;
        pj = j;
        found = true;
      }
    }
  return found;
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

SmithDecomposition smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  IntMatrix d = a;
  IntMatrix u = IntMatrix::identity(m);
  IntMatrix v = IntMatrix::identity(n);
  std::size_t t = 0;

  for (; t < std::min(m, n); ++t) {
    std::size_t pi = 0, pj = 0;
    if (!find_pivot(d, t, pi, pj)) break;
    for (;;) {
      d.swap_rows(t, pi);
      u.swap_rows(t, pi);
      d.swap_cols(t, pj);
      v.swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        const Integer q = floor_div(d(i, t), d(t, t));
        d.add_row_multiple(i, t, -q);
        u.add_row_multiple(i, t, -q);
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        const Integer q = floor_div(d(t, j), d(t, t));
        d.add_col_multiple(j, t, -q);
        v.add_col_multiple(j, t, -q);
        if (d(t, j) != 0) clean = false;
      }

      if (clean) {
        // Divisibility: the pivot must divide the whole trailing block.
        bool divides = true;
        for (std::size_t i = t + 1; i < m && divides; ++i)
          for (std::size_t j = t + 1; j < n; ++j)
            if (!mpz_divisible_p(d(i, j).get_mpz_t(), d(t, t).get_mpz_t())) {
              d.add_row_multiple(t, i, 1);
              u.add_row_multiple(t, i, 1);
              divides = false;
              break;
            }
        if (divides) break;
      }
      find_pivot(d, t, pi, pj);
    }
    if (d(t, t) < 0) {
      d.negate_row(t);
      u.negate_row(t);
    }
  }
  return SmithDecomposition{std::move(u), std::move(d), std::move(v), t};
}

RationalVector SolutionSet::point(std::size_t component, std::span<const Rational> params) const {
  if (component >= translates.size()) throw std::out_of_range("solution component out of range");
  if (params.size() != subtorus_basis.size()) throw DimensionError("wrong number of subtorus parameters");
  RationalVector x = translates[component];
  for (std::size_t k = 0; k < params.size(); ++k)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += params[k] * subtorus_basis[k][i];
  return frac(x);
}

SolutionSet solve_torus_congruence(const IntMatrix& a, std::span<const Rational> b) {
  if (!a.is_square()) throw DimensionError("congruence matrix must be square");
  if (b.size() != a.rows()) throw DimensionError("right-hand side has the wrong length");
  const std::size_t n = a.rows();
  const SmithDecomposition snf = smith_normal_form(a);
  const RationalVector c = snf.left * b;

  SolutionSet out;
  out.dimension = n;
  for (std::size_t i = snf.rank; i < n; ++i)
    if (!is_integral(c[i])) return out;  // 0 = c_i has no solution

  // In Smith coordinates y = V^{-1} x the system is d_i y_i = c_i (mod 1).
  IntegerVector moduli;
  RationalVector base(n, Rational(0));
  Integer count = 1;
  for (std::size_t i = 0; i < snf.rank; ++i) {
    const Integer& di = snf.diagonal(i, i);
    moduli.push_back(di);
    base[i] = frac(c[i] / Rational(di));
    count *= di;
  }
  if (count > Integer(static_cast<unsigned long>(kMaxSolutionComponents)))
    throw std::length_error("congruence has too many components to enumerate");

  for (std::size_t i = snf.rank; i < n; ++i) {
    RationalVector dir(n);
    for (std::size_t r = 0; r < n; ++r) dir[r] = snf.right(r, i);
    out.subtorus_basis.push_back(std::move(dir));
  }

  // Odometer over j_0, ..., j_{rank-1}; the last coordinate varies fastest.
  std::vector<unsigned long> digits(snf.rank, 0);
  for (;;) {
    RationalVector y = base;
    for (std::size_t i = 0; i < snf.rank; ++i) y[i] += Rational(Integer(digits[i]), moduli[i]);
    out.translates.push_back(frac(snf.right * std::span<const Rational>(y)));
    bool wrapped = true;
    for (std::size_t k = snf.rank; k-- > 0;) {
      if (++digits[k] < moduli[k].get_ui()) {
        wrapped = false;
        break;
      }
      digits[k] = 0;
    }
    if (wrapped) break;
  }

  out.particular = out.translates.front();
  out.kind = (snf.rank == 0) ? SolutionSet::Kind::all : SolutionSet::Kind::coset_union;
  return out;
}

std::optional<Integer> AbelianGroupStructure::order() const {
  if (free_rank != 0) return std::nullopt;
  Integer o = 1;
  for (const auto& f : invariant_factors) o *= f;
  return o;
}

AbelianGroupStructure cokernel(const IntMatrix& a) {
  const SmithDecomposition snf = smith_normal_form(a);
  AbelianGroupStructure g;
  for (std::size_t i = 0; i < snf.rank; ++i)
    if (snf.diagonal(i, i) != 1) g.invariant_factors.push_back(snf.diagonal(i, i));
  g.free_rank = a.rows() - snf.rank;
  return g;
}

IntegerVector cokernel_class(const SmithDecomposition& snf, std::span<const Integer> k) {
  const IntMatrix& u = snf.left;
  if (k.size() != u.cols()) throw DimensionError("class vector has the wrong length");
  IntegerVector out(u.rows(), Integer(0));
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) out[i] += u(i, j) * k[j];
  for (std::size_t i = 0; i < snf.rank; ++i) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), out[i].get_mpz_t(), snf.diagonal(i, i).get_mpz_t());
    out[i] = r;
  }
  return out;
}

std::string to_string(std::span<const Rational> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i].get_str();
  }
  return s;
}

}  // namespace nbu
