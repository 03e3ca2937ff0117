#include <algorithm>

#include "nbu/coincidence.hpp"

namespace nbu {

namespace {

constexpr unsigned kMaxRetries = 3;
constexpr unsigned kRetryStep = 4;

bool retryable(NumericError::Kind k) {
  return k == NumericError::Kind::degenerate_jacobian || k == NumericError::Kind::non_isolated ||
         k == NumericError::Kind::corner;
}

NBUReport evaluate(const Realizer& r, const FreeInvolution& s, const NumericOptions& opts) {
  const std::size_t n = s.dimension();
  NBUReport rep;
  rep.method = Method::numeric_oracle;
  rep.realizer = r;
  rep.diagnostics.n0 = r.n0;
  rep.diagnostics.branches = {r.branch, r.construction};
  if (n <= 3) {
    rep.points = find_coincidences_numeric(r.map, s, opts);
    rep.diagnostics.search = "grid";
    rep.diagnostics.grid = std::max<std::size_t>(opts.grid, 16);
  } else {
    // Constructions in high dimension only place coincidences on the half lattice.
    const auto candidates = half_lattice(n);
    rep.points = place_coincidences(r.map, s, candidates, opts);
    rep.diagnostics.search = "placement";
  }
  const unsigned max_den = 4 * r.max_denominator;
  for (auto& p : rep.points) {
    rep.diagnostics.residual_max = std::max(rep.diagnostics.residual_max, p.residual);
    p.snapped = snap_point(p.coords, max_den, opts.snap_radius);
    if (!p.snapped)
      throw NumericError(NumericError::Kind::non_isolated, "coincidence does not snap to a rational point");
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const auto& a, const auto& b) { return a.snapped->coords() < b.snapped->coords(); });
  for (auto& p : rep.points) {
    p.usual_class = usual_class_of(*p.snapped, r.map, s);
    p.local_index = local_index_numeric(r.map, s, p.coords, opts.degeneracy_tol);
  }
  rep.coincidence_pair_count = rep.points.size() / 2;
  rep.classes = bu_pairing(rep.points, s, opts.dedupe_radius * 10);
  for (auto& c : rep.classes) {
    c.pseudo_index = pseudo_index(c, rep.points, n, s.orientation);
    c.essential = c.pseudo_index != 0;
    if (c.essential) ++rep.nbu;
  }
  return rep;
}

}  // namespace

NBUReport nbu_first_principles(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts) {
  unsigned n0 = 0;
  for (unsigned attempt = 0;; ++attempt) {
    const Realizer r = build_realizer(m, s, n0);
    try {
      NBUReport rep = evaluate(r, s, opts);
      rep.diagnostics.retries = attempt;
      return rep;
    } catch (const NumericError& e) {
      if (attempt >= kMaxRetries || !retryable(e.kind())) throw;
      n0 = r.n0 + kRetryStep;
    }
  }
}

}  // namespace nbu
