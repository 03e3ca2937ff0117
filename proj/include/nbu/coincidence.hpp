#pragma once

// First-principles Nielsen-Borsuk-Ulam computation: coincidence sets of
// (f, f o s), Reidemeister classes, Borsuk-Ulam pairing, pseudo-indices,
// explicit realizers and a numeric coincidence finder.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nbu/lattice.hpp"
#include "nbu/torus.hpp"

namespace nbu {

class NumericError : public std::runtime_error {
public:
  enum class Kind {
    degenerate_jacobian,
    non_isolated,
    corner,
    not_closed,
    not_a_coincidence,
    missing_index,
    index_inconsistency,
  };
  NumericError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

class UnsupportedRealizer : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// amplitude * sin(pi * half_frequency * frac(t + shift)), a null-homotopic
/// circle map added to coordinate `target` as a function of coordinate `source`.
/// half_frequency 2 is the smooth epsilon term; 1 is the delta term, which
/// has a corner where frac(t + shift) = 0.
struct PerturbationTerm {
  std::size_t target = 0;
  std::size_t source = 0;
  Rational amplitude;
  unsigned half_frequency = 2;
  Rational shift{0};

  double value(double t) const;
  double derivative(double t) const;
  bool smooth() const { return half_frequency % 2 == 0; }
  /// Distance of frac(t + shift) from the corner at 0 (infinite for smooth terms).
  double corner_distance(double t) const;

  friend bool operator==(const PerturbationTerm&, const PerturbationTerm&) = default;
};

struct PerturbedMap {
  AffineTorusMap base;
  std::vector<PerturbationTerm> terms;

  std::size_t dimension() const { return base.dimension(); }
  /// Lifted value base(x) + sum of terms.
  std::vector<double> evaluate(std::span<const double> x) const;
};

/// A map homotopic to the linear map of M, built so that its coincidences with
/// f o s attain the Nielsen-Borsuk-Ulam number.
struct Realizer {
  PerturbedMap map;
  unsigned n0 = 0;
  /// Closed-form branch of the case plus the construction used.
  std::string branch;
  std::string construction;
  /// Coincidences lie on points with denominators dividing this.
  unsigned max_denominator = 2;
};

/// n0 = 0 selects the default (3 on T^1, max(5, 4 * max_denominator) otherwise).
Realizer build_realizer(const IntMatrix& m, const FreeInvolution& s, unsigned n0 = 0);

/// g(x) = f'(x) - f'(s(x)) on lifts, with its Jacobian and a per-entry
/// Lipschitz bound used to discard grid cells.
class CoincidenceFunction {
public:
  CoincidenceFunction(const PerturbedMap& map, const FreeInvolution& s);

  std::size_t dimension() const { return n_; }
  void residual(std::span<const double> x, std::span<double> g) const;
  void jacobian(std::span<const double> x, std::span<double> jac) const;
  /// s(x) reduced into [0, 1)^n.
  std::vector<double> involution(std::span<const double> x) const;
  /// |d g_i / d x_j| <= lipschitz()[i * n + j] everywhere.
  const std::vector<double>& lipschitz() const { return lipschitz_; }

private:
  std::size_t n_;
  std::vector<double> linear_;    // L = A (I - S)
  std::vector<double> constant_;  // A t
  std::vector<double> s_linear_;
  std::vector<double> s_shift_;
  struct Term {
    std::size_t target, source;
    double amplitude, frequency, shift;
    double value(double t) const;
    double derivative(double t) const;
  };
  std::vector<Term> terms_;
  std::vector<double> lipschitz_;
};

using ClassId = IntegerVector;

struct CoincidencePoint {
  std::vector<double> coords;
  std::optional<TorusPoint> snapped;
  int local_index = 0;
  std::optional<ClassId> usual_class;
  double residual = 0.0;
};

enum class ClassKind { single, double_class };

std::string_view to_string(ClassKind k);

struct BUClass {
  /// Point indices (x, s(x)); for double classes every first entry lies in C1.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  ClassKind kind = ClassKind::single;
  std::vector<ClassId> usual_classes;
  Integer pseudo_index = 0;
  bool essential = false;
};

struct NumericOptions {
  std::size_t grid = 64;
  double tol = 1e-10;
  double dedupe_radius = 1e-6;
  double snap_radius = 1e-6;
  double degeneracy_tol = 1e-9;
  std::size_t max_points = 4096;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// A (I - S): the linear part of x -> f(x) - f(s(x)).
IntMatrix coincidence_matrix(const IntMatrix& a, const FreeInvolution& s);

/// Distance on R^n / Z^n in the max norm.
double torus_distance(std::span<const double> a, std::span<const double> b);

/// Exact locus Coin(f, f o s): A (I - S) x = A t (mod Z^n).
SolutionSet coincidence_set_affine(const AffineTorusMap& f, const FreeInvolution& s);

/// Reidemeister class of an exact coincidence point of (f, f o s), as a
/// canonical element of coker(A (I - S)).
ClassId usual_class_of(const TorusPoint& x, const AffineTorusMap& f, const FreeInvolution& s);
/// Same for a perturbed map at an exact (snapped) point; the perturbation is
/// evaluated in floating point and the integer lift difference is rounded.
ClassId usual_class_of(const TorusPoint& x, const PerturbedMap& f, const FreeInvolution& s);

/// Groups the pairs (x, s(x)) into Borsuk-Ulam classes. Points must carry
/// usual classes and be closed under s.
std::vector<BUClass> bu_pairing(std::span<const CoincidencePoint> points, const FreeInvolution& s,
                                double radius = 1e-6);

Integer pseudo_index(const BUClass& c, std::span<const CoincidencePoint> points, std::size_t n, Orientation o);

/// Sign of det of the Jacobian of x -> f'(x) - f'(s(x)).
int local_index_numeric(const PerturbedMap& p, const FreeInvolution& s, std::span<const double> x,
                        double degeneracy_tol = 1e-9);

std::vector<CoincidencePoint> find_coincidences_numeric(const PerturbedMap& p, const FreeInvolution& s,
                                                        const NumericOptions& opts = {});

/// Newton-refines each candidate and keeps those that converge (deduplicated).
std::vector<CoincidencePoint> place_coincidences(const PerturbedMap& p, const FreeInvolution& s,
                                                 std::span<const std::vector<double>> candidates,
                                                 const NumericOptions& opts = {});

/// All 2^n points with coordinates in {0, 1/2}.
std::vector<std::vector<double>> half_lattice(std::size_t n);

/// Nearest rational point with denominators <= max_den within `radius`.
std::optional<TorusPoint> snap_point(std::span<const double> x, unsigned max_den, double radius);

/// ind(c) = (-1)^n ind(s c) when s preserves orientation, (-1)^(n-1) ind(s c) otherwise.
bool index_parity_check(std::span<const CoincidencePoint> points, const FreeInvolution& s, std::size_t n,
                        double radius = 1e-6);

enum class Method { closed_form, exact_affine, numeric_oracle };

std::string_view to_string(Method m);

struct NBUReport {
  Integer nbu = 0;
  Method method = Method::numeric_oracle;
  std::vector<CoincidencePoint> points;
  std::vector<BUClass> classes;
  std::size_t coincidence_pair_count = 0;
  Realizer realizer;

  struct Diagnostics {
    std::vector<std::string> branches;
    unsigned n0 = 0;
    std::size_t grid = 0;
    double residual_max = 0.0;
    std::string search;
    unsigned retries = 0;
  } diagnostics;
};

/// build_realizer -> numeric coincidences -> snapping and usual classes ->
/// pairing -> local indices -> pseudo-indices -> count of essential classes.
/// Degenerate realizers are rebuilt with a larger n0 (at most 3 times).
NBUReport nbu_first_principles(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts = {});

}  // namespace nbu
