#pragma once

// Direct NBU formulas on the induced matrix for the catalog involutions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nbu/lattice.hpp"
#include "nbu/torus.hpp"

namespace nbu {

enum class VerdictStatus { exact, conjectured, unknown };

std::string_view to_string(VerdictStatus s);

struct ClosedFormVerdict {
  std::optional<Integer> value;
  VerdictStatus status = VerdictStatus::unknown;
  std::string branch;
  /// Possible values when the status is `conjectured`.
  std::vector<Integer> candidates;
  /// Named integer invariants used (or merely reported) by the branch, e.g.
  /// the 2x2 minors p, q, o on T^3.
  std::map<std::string, Integer> diagnostics;

  static ClosedFormVerdict exact(Integer v, std::string branch);
};

class UnsupportedInvolution : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

ClosedFormVerdict nbu_t1(const Integer& a);

/// Whether the class of M has the Borsuk-Ulam property for the orientation
/// reversing involution (x, y) -> (-x, y + 1/2).
bool bup_t2_tau2(const IntMatrix& m);

ClosedFormVerdict nbu_t2(const IntMatrix& m, const FreeInvolution& tau);
ClosedFormVerdict nbu_t3(const IntMatrix& m, const FreeInvolution& h);
ClosedFormVerdict nbu_tn(const IntMatrix& m, const FreeInvolution& tau);

/// Identity (n-1)-block, even last column, zero last row except the corner.
bool is_g_family(const IntMatrix& m);

/// Dispatches on dimension and tag. Custom involutions are matched to a
/// catalog class by conjugacy invariants; when that does not determine the
/// answer the verdict is `unknown`.
ClosedFormVerdict closed_form_nbu(const IntMatrix& m, const FreeInvolution& tau);

/// Every branch label the closed form can emit for catalog involutions in
/// dimension `dim`.
std::vector<std::string> closed_form_branches(std::size_t dim);

}  // namespace nbu
