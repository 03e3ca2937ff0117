#pragma once

// Commands behind the CLI and the batch cross-check of the closed form
// against first-principles counts. Reports are JSON (canonical), with CSV and
// plain-text projections.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbu/closed_form.hpp"
#include "nbu/coincidence.hpp"

namespace nbu {

inline constexpr int kReportSchema = 1;

enum class Mode { compute, verify, realize, batch };
enum class Format { json, csv, text };

std::string_view to_string(Mode m);
std::string_view to_string(Format f);
Mode parse_mode(std::string_view s);
Format parse_format(std::string_view s);

struct RunConfig {
  Mode mode = Mode::compute;
  /// 0 lets the matrix decide (and, for batch, runs dimensions 1..4).
  std::size_t dimension = 0;
  std::string matrix;
  /// Catalog tag or short name; empty with a custom map means custom.
  std::string involution;
  std::string custom_linear;
  std::string custom_translation;
  std::size_t grid = 64;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::size_t count = 100;
  long range_lo = -3;
  long range_hi = 3;
  Format format = Format::json;
  /// Worker threads for batch cases; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

struct CaseResult {
  std::size_t index = 0;
  IntMatrix matrix;
  std::string involution;
  ClosedFormVerdict closed;
  std::optional<Integer> first_principles;
  std::size_t points = 0;
  std::size_t pairs = 0;
  std::string construction;
  unsigned n0 = 0;
  bool parity_ok = true;
  /// "agree", "disagree", or "unverified" (no realizer for the case).
  std::string outcome;
  std::string reason;
};

struct BatchSummary {
  std::size_t cases_run = 0;
  std::size_t agreements = 0;
  std::size_t unverified = 0;
  std::vector<std::size_t> disagreements;
  std::map<std::string, std::size_t> coverage;
  std::vector<std::string> uncovered;
  std::vector<CaseResult> cases;
};

struct Report {
  int exit_code = 0;
  nlohmann::ordered_json body;
};

/// Cross-checks one case; never throws for numeric or realizer failures.
CaseResult verify_case(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts, std::size_t index = 0);

/// Uniform entries in [lo, hi], row-major, drawn from mt19937_64(seed).
std::vector<IntMatrix> random_matrices(std::size_t dim, std::size_t count, std::uint64_t seed, long lo, long hi);

/// Hand-picked matrices hitting every closed-form branch for `dim`, paired
/// with the catalog involution each one targets.
std::vector<std::pair<IntMatrix, std::string>> branch_exemplars(std::size_t dim);

/// Cases run concurrently; results are merged in case order.
BatchSummary run_batch(const std::vector<std::pair<IntMatrix, FreeInvolution>>& cases, const NumericOptions& opts,
                       unsigned threads);

Report cmd_compute(const IntMatrix& m, const FreeInvolution& s);
Report cmd_verify(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts);
Report cmd_realize(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts);
/// Random cases for `dim` (all catalog involutions unless `involution` is set);
/// with `curated` the branch exemplars are prepended and coverage is gated.
Report cmd_batch(std::size_t dim, const std::string& involution, const RunConfig& cfg, bool curated);

/// Parses the config and dispatches; input errors become exit code 1.
Report run(const RunConfig& cfg);

Report error_report(std::string_view command, std::string_view kind, std::string_view message);

std::string render(const Report& r, Format f);

NumericOptions numeric_options(const RunConfig& cfg);

/// Catalog involutions available in `dim`, as full ids.
std::vector<std::string> catalog_tags(std::size_t dim);

}  // namespace nbu
