// nbu: command-line front end over the C interface.
//
//   nbu compute --dim 3 --matrix "1,0,0;0,1,0;1,1,2" --involution h2
//   nbu verify  --dim 2 --matrix "1,0;0,2" --involution tau2
//   nbu realize --dim 1 --matrix 2 --involution antipodal
//   nbu batch   --dim 2 --seed 7 --count 200
//
// Exit codes: 0 success or agreement, 1 invalid input, 2 verification mismatch.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "nbu/nbu.h"

namespace {

struct Args {
  std::size_t dim = 0;
  std::string matrix;
  std::string involution;
  std::string linear;
  std::string translation;
  std::string range = "-3,3";
  std::string format = "json";
  std::string out;
  nbu_options opts = nbu_options_default();
};

int input_error(const std::string& what) {
  std::cerr << "nbu: " << what << "\n";
  return 1;
}

bool parse_range(const std::string& text, long& lo, long& hi) {
  const auto sep = text.find_first_of(",:", 1);
  if (sep == std::string::npos) return false;
  try {
    std::size_t used = 0;
    lo = std::stol(text.substr(0, sep), &used);
    if (used != sep) return false;
    const std::string rest = text.substr(sep + 1);
    hi = std::stol(rest, &used);
    return used == rest.size() && lo <= hi;
  } catch (const std::exception&) {
    return false;
  }
}

using MatrixPtr = std::unique_ptr<nbu_matrix, decltype(&nbu_matrix_free)>;
using InvolutionPtr = std::unique_ptr<nbu_involution, decltype(&nbu_involution_free)>;
using ReportPtr = std::unique_ptr<nbu_report, decltype(&nbu_report_free)>;

int run(const std::string& mode, Args& a) {
  nbu_format fmt = NBU_FORMAT_JSON;
  if (a.format == "csv") fmt = NBU_FORMAT_CSV;
  else if (a.format == "text") fmt = NBU_FORMAT_TEXT;
  else if (a.format != "json") return input_error("unknown format '" + a.format + "'");
  if (!parse_range(a.range, a.opts.range_lo, a.opts.range_hi)) return input_error("bad --range '" + a.range + "'");

  nbu_report* raw = nullptr;
  nbu_status st = NBU_OK;
  if (mode == "batch" || (mode == "verify" && a.matrix.empty())) {
    if (mode == "verify" && a.dim == 0) return input_error("verify without --matrix needs --dim");
    st = nbu_batch(a.dim, a.involution.empty() ? nullptr : a.involution.c_str(), &a.opts, mode == "batch", &raw);
  } else {
    if (a.matrix.empty()) return input_error("--matrix is required");
    nbu_matrix* mraw = nullptr;
    if (nbu_matrix_parse(a.matrix.c_str(), a.dim, &mraw) != NBU_OK) return input_error(nbu_last_error());
    MatrixPtr m(mraw, nbu_matrix_free);
    const std::size_t n = nbu_matrix_dimension(m.get());

    nbu_involution* sraw = nullptr;
    if (!a.linear.empty()) {
      st = nbu_involution_custom(a.linear.c_str(), a.translation.empty() ? nullptr : a.translation.c_str(), n, &sraw);
    } else if (!a.involution.empty()) {
      st = nbu_involution_catalog(n, a.involution.c_str(), &sraw);
    } else {
      return input_error("--involution or --linear is required");
    }
    if (st != NBU_OK) return input_error(nbu_last_error());
    InvolutionPtr s(sraw, nbu_involution_free);

    if (mode == "compute") st = nbu_compute(m.get(), s.get(), &raw);
    else if (mode == "verify") st = nbu_verify(m.get(), s.get(), &a.opts, &raw);
    else st = nbu_realize(m.get(), s.get(), &a.opts, &raw);
  }
  if (st == NBU_ERR_NUMERIC) {
    std::cerr << "nbu: " << nbu_last_error() << "\n";
    return 2;
  }
  if (st != NBU_OK) return input_error(nbu_last_error());
  ReportPtr report(raw, nbu_report_free);

  const char* text = nbu_report_render(report.get(), fmt);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!(f << text)) return input_error("cannot write " + a.out);
  }
  return nbu_report_exit_code(report.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nielsen-Borsuk-Ulam numbers of torus maps under free involutions"};
  app.require_subcommand(1);
  Args a;
  std::string mode;

  const std::pair<const char*, const char*> commands[] = {
      {"compute", "Closed-form value"},
      {"verify", "Closed form against a first-principles count (random batch without --matrix)"},
      {"realize", "Explicit realizer with its coincidences, indices and classes"},
      {"batch", "Seeded random cross-check with branch coverage"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--dim", a.dim, "Torus dimension (0 infers it from the matrix)");
    sub->add_option("--matrix", a.matrix, "Induced matrix, \"a,b;c,d\" or [[a,b],[c,d]]");
    sub->add_option("--involution", a.involution, "Catalog involution, e.g. t3.h2 or h2");
    sub->add_option("--linear", a.linear, "Linear part of a custom involution");
    sub->add_option("--translation", a.translation, "Translation of a custom involution, e.g. 0,1/2");
    sub->add_option("--grid", a.opts.grid, "Grid cells per axis for the coincidence search")->check(CLI::Range(16, 4096));
    sub->add_option("--tol", a.opts.tol, "Newton residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", a.opts.seed, "Seed for random batch matrices");
    sub->add_option("--count", a.opts.count, "Random matrices per dimension");
    sub->add_option("--range", a.range, "Entry range for random matrices, lo,hi");
    sub->add_option("--format", a.format, "json, csv or text");
    sub->add_option("--out", a.out, "Write the report here instead of stdout");
    sub->add_option("--threads", a.opts.threads, "Worker threads (0: all cores)");
    sub->callback([&mode, name] { mode = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return run(mode, a);
}
