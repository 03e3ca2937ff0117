#include "nbu/nbu.h"

#include <cstring>
#include <string>

#include "nbu/report.hpp"

struct nbu_matrix {
  nbu::IntMatrix rep;
};
struct nbu_involution {
  nbu::FreeInvolution rep;
};
struct nbu_report {
  nbu::Report rep;
  std::string rendered;
};

namespace {

thread_local std::string last_error;

nbu_status fail(nbu_status s, const char* what) {
  last_error = what;
  return s;
}

// Runs body, translating exceptions into status codes.
template <class F>
nbu_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return NBU_OK;
  } catch (const nbu::ParseError& e) {
    return fail(NBU_ERR_PARSE, e.what());
  } catch (const nbu::DimensionError& e) {
    return fail(NBU_ERR_DIMENSION, e.what());
  } catch (const nbu::UnsupportedInvolution& e) {
    return fail(NBU_ERR_UNSUPPORTED, e.what());
  } catch (const nbu::UnsupportedRealizer& e) {
    return fail(NBU_ERR_UNSUPPORTED, e.what());
  } catch (const nbu::NumericError& e) {
    return fail(NBU_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(NBU_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(NBU_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NBU_ERR_INTERNAL, "unknown error");
  }
}

nbu::RunConfig config_from(const nbu_options* o) {
  nbu::RunConfig cfg;
  if (!o) return cfg;
  cfg.grid = o->grid;
  cfg.tol = o->tol;
  cfg.seed = o->seed;
  cfg.count = o->count;
  cfg.range_lo = o->range_lo;
  cfg.range_hi = o->range_hi;
  cfg.threads = o->threads;
  return cfg;
}

#define NBU_REQUIRE(cond)                                                    \
  do {                                                                       \
    if (!(cond)) return fail(NBU_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

nbu_options nbu_options_default(void) {
  const nbu::RunConfig cfg;
  return {cfg.grid, cfg.tol, cfg.seed, cfg.count, cfg.range_lo, cfg.range_hi, cfg.threads};
}

const char* nbu_last_error(void) { return last_error.c_str(); }

const char* nbu_status_string(nbu_status s) {
  switch (s) {
    case NBU_OK: return "ok";
    case NBU_ERR_PARSE: return "parse error";
    case NBU_ERR_UNSUPPORTED: return "unsupported";
    case NBU_ERR_DIMENSION: return "dimension mismatch";
    case NBU_ERR_NUMERIC: return "numeric failure";
    case NBU_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NBU_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

nbu_status nbu_matrix_parse(const char* text, size_t dim, nbu_matrix** out) {
  NBU_REQUIRE(text && out);
  return guarded([&] { *out = new nbu_matrix{nbu::parse_matrix(text, dim)}; });
}

size_t nbu_matrix_dimension(const nbu_matrix* m) { return m ? m->rep.rows() : 0; }

void nbu_matrix_free(nbu_matrix* m) { delete m; }

nbu_status nbu_involution_catalog(size_t dim, const char* tag, nbu_involution** out) {
  NBU_REQUIRE(tag && out);
  return guarded([&] { *out = new nbu_involution{nbu::catalog_involution(dim, tag)}; });
}

nbu_status nbu_involution_custom(const char* linear, const char* translation, size_t dim, nbu_involution** out) {
  NBU_REQUIRE(linear && out);
  return guarded([&] {
    const nbu::IntMatrix lin = nbu::parse_matrix(linear, dim);
    const std::size_t n = lin.rows();
    const nbu::RationalVector t =
        translation ? nbu::parse_rational_vector(translation, n) : nbu::RationalVector(n, nbu::Rational(0));
    *out = new nbu_involution{nbu::custom_involution(nbu::AffineTorusMap(lin, t))};
  });
}

void nbu_involution_free(nbu_involution* s) { delete s; }

nbu_status nbu_closed_form(const nbu_matrix* m, const nbu_involution* s, long long* value, int* known, char* branch,
                           size_t branch_len) {
  NBU_REQUIRE(m && s && value && known);
  return guarded([&] {
    const nbu::ClosedFormVerdict v = nbu::closed_form_nbu(m->rep, s->rep);
    *known = v.status == nbu::VerdictStatus::exact ? 1 : 0;
    *value = v.value ? v.value->get_si() : -1;
    if (branch && branch_len) {
      std::strncpy(branch, v.branch.c_str(), branch_len - 1);
      branch[branch_len - 1] = '\0';
    }
  });
}

nbu_status nbu_first_principles(const nbu_matrix* m, const nbu_involution* s, const nbu_options* opts,
                                long long* value, size_t* pairs) {
  NBU_REQUIRE(m && s && value);
  return guarded([&] {
    const nbu::NBUReport rep = nbu::nbu_first_principles(m->rep, s->rep, nbu::numeric_options(config_from(opts)));
    *value = rep.nbu.get_si();
    if (pairs) *pairs = rep.coincidence_pair_count;
  });
}

nbu_status nbu_compute(const nbu_matrix* m, const nbu_involution* s, nbu_report** out) {
  NBU_REQUIRE(m && s && out);
  return guarded([&] { *out = new nbu_report{nbu::cmd_compute(m->rep, s->rep), {}}; });
}

nbu_status nbu_verify(const nbu_matrix* m, const nbu_involution* s, const nbu_options* opts, nbu_report** out) {
  NBU_REQUIRE(m && s && out);
  return guarded([&] {
    *out = new nbu_report{nbu::cmd_verify(m->rep, s->rep, nbu::numeric_options(config_from(opts))), {}};
  });
}

nbu_status nbu_realize(const nbu_matrix* m, const nbu_involution* s, const nbu_options* opts, nbu_report** out) {
  NBU_REQUIRE(m && s && out);
  return guarded([&] {
    *out = new nbu_report{nbu::cmd_realize(m->rep, s->rep, nbu::numeric_options(config_from(opts))), {}};
  });
}

nbu_status nbu_batch(size_t dim, const char* tag, const nbu_options* opts, int curated, nbu_report** out) {
  NBU_REQUIRE(out);
  return guarded([&] {
    *out = new nbu_report{nbu::cmd_batch(dim, tag ? tag : "", config_from(opts), curated != 0), {}};
  });
}

int nbu_report_exit_code(const nbu_report* r) { return r ? r->rep.exit_code : 1; }

const char* nbu_report_render(nbu_report* r, nbu_format f) {
  if (!r) return "";
  nbu::Format fmt = nbu::Format::json;
  if (f == NBU_FORMAT_CSV) fmt = nbu::Format::csv;
  if (f == NBU_FORMAT_TEXT) fmt = nbu::Format::text;
  r->rendered = nbu::render(r->rep, fmt);
  return r->rendered.c_str();
}

void nbu_report_free(nbu_report* r) { delete r; }

}  // extern "C"
