#include "nbu/report.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>
#include <thread>

namespace nbu {

using nlohmann::ordered_json;

namespace {

ordered_json int_json(const Integer& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

ordered_json class_json(const ClassId& c) {
  ordered_json out = ordered_json::array();
  for (const auto& v : c) out.push_back(int_json(v));
  return out;
}

ordered_json rational_json(std::span<const Rational> v) {
  ordered_json out = ordered_json::array();
  for (const auto& q : v) out.push_back(q.get_str());
  return out;
}

std::string involution_id(const FreeInvolution& s) { return std::string(tag_id(s.tag)); }

ordered_json involution_json(const FreeInvolution& s) {
  ordered_json out;
  out["id"] = involution_id(s);
  out["orientation"] = std::string(to_string(s.orientation));
  if (s.tag == InvolutionTag::custom) {
    out["linear"] = s.linear().to_text();
    out["translation"] = rational_json(s.translation());
  }
  return out;
}

ordered_json verdict_json(const ClosedFormVerdict& v) {
  ordered_json out;
  out["nbu"] = v.value ? int_json(*v.value) : ordered_json(nullptr);
  out["status"] = std::string(to_string(v.status));
  out["branch"] = v.branch;
  if (!v.candidates.empty()) {
    out["candidates"] = ordered_json::array();
    for (const auto& c : v.candidates) out["candidates"].push_back(int_json(c));
  }
  if (!v.diagnostics.empty()) {
    out["diagnostics"] = ordered_json::object();
    for (const auto& [k, val] : v.diagnostics) out["diagnostics"][k] = int_json(val);
  }
  return out;
}

ordered_json case_json(const CaseResult& c) {
  ordered_json out;
  out["index"] = c.index;
  out["dimension"] = c.matrix.rows();
  out["matrix"] = c.matrix.to_text();
  out["involution"] = c.involution;
  out["closed_form"] = verdict_json(c.closed);
  if (c.first_principles) {
    ordered_json fp;
    fp["nbu"] = int_json(*c.first_principles);
    fp["points"] = c.points;
    fp["pairs"] = c.pairs;
    fp["construction"] = c.construction;
    fp["n0"] = c.n0;
    fp["index_parity"] = c.parity_ok;
    out["first_principles"] = fp;
  } else {
    out["first_principles"] = nullptr;
  }
  out["outcome"] = c.outcome;
  if (!c.reason.empty()) out["reason"] = c.reason;
  return out;
}

ordered_json summary_json(const BatchSummary& s) {
  ordered_json out;
  out["cases_run"] = s.cases_run;
  out["agreements"] = s.agreements;
  out["unverified"] = s.unverified;
  out["disagreements"] = s.disagreements.size();
  out["coverage"] = ordered_json::object();
  for (const auto& [branch, n] : s.coverage) out["coverage"][branch] = n;
  out["uncovered"] = s.uncovered;
  return out;
}

std::string short_name(std::string_view id) {
  if (id.starts_with("tn.")) return std::string(id);
  return std::string(id.substr(id.find('.') + 1));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\";\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void render_text(const ordered_json& v, const std::string& indent, std::ostringstream& out) {
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::string key = v.is_object() ? it.key() : "-";
    const auto& val = it.value();
    const bool leaf_array = val.is_array() && std::none_of(val.begin(), val.end(), [](const auto& e) {
                              return e.is_object() || e.is_array();
                            });
    if (val.is_primitive()) {
      out << indent << key << ": " << scalar_text(val) << "\n";
    } else if (leaf_array) {
      out << indent << key << ": [";
      for (std::size_t i = 0; i < val.size(); ++i) out << (i ? ", " : "") << scalar_text(val[i]);
      out << "]\n";
    } else {
      out << indent << key << ":\n";
      render_text(val, indent + "  ", out);
    }
  }
}

std::string render_csv(const ordered_json& body) {
  std::ostringstream out;
  const std::string command = body.value("command", "");
  if (body.contains("error")) {
    out << "command,error,message\n"
        << csv_field(command) << "," << csv_field(body["error"]["kind"].get<std::string>()) << ","
        << csv_field(body["error"]["message"].get<std::string>()) << "\n";
    return out.str();
  }
  if (command == "compute") {
    out << "dimension,matrix,involution,nbu,status,branch,p,q,o\n";
    const auto diag = body.value("diagnostics", ordered_json::object());
    out << body["dimension"].dump() << "," << csv_field(body["matrix"].get<std::string>()) << ","
        << csv_field(body["involution"]["id"].get<std::string>()) << "," << scalar_text(body["nbu"]) << ","
        << body["status"].get<std::string>() << "," << body["branch"].get<std::string>() << ","
        << scalar_text(diag.value("p", ordered_json())) << "," << scalar_text(diag.value("q", ordered_json()))
        << "," << scalar_text(diag.value("o", ordered_json())) << "\n";
    return out.str();
  }
  if (command == "realize") {
    out << "point,coords,exact,local_index,usual_class,bu_class\n";
    for (const auto& p : body["points"]) {
      std::string coords, exact, cls;
      for (const auto& c : p["coords"]) coords += (coords.empty() ? "" : " ") + c.dump();
      for (const auto& c : p["exact"]) exact += (exact.empty() ? "" : " ") + c.get<std::string>();
      for (const auto& c : p["usual_class"]) cls += (cls.empty() ? "" : " ") + scalar_text(c);
      out << p["point"].dump() << "," << csv_field(coords) << "," << csv_field(exact) << ","
          << p["local_index"].dump() << "," << csv_field(cls) << "," << p["bu_class"].dump() << "\n";
    }
    return out.str();
  }
  out << "index,dimension,matrix,involution,closed_nbu,status,branch,first_principles_nbu,points,pairs,"
         "construction,outcome,reason\n";
  const ordered_json cases = body.contains("case") ? ordered_json::array({body["case"]}) : body["cases"];
  for (const auto& c : cases) {
    const auto& fp = c["first_principles"];
    out << c["index"].dump() << "," << c["dimension"].dump() << "," << csv_field(c["matrix"].get<std::string>())
        << "," << c["involution"].get<std::string>() << "," << scalar_text(c["closed_form"]["nbu"]) << ","
        << c["closed_form"]["status"].get<std::string>() << "," << c["closed_form"]["branch"].get<std::string>()
        << "," << (fp.is_null() ? "" : scalar_text(fp["nbu"])) << "," << (fp.is_null() ? "" : fp["points"].dump())
        << "," << (fp.is_null() ? "" : fp["pairs"].dump()) << ","
        << (fp.is_null() ? "" : fp["construction"].get<std::string>()) << "," << c["outcome"].get<std::string>()
        << "," << csv_field(c.value("reason", "")) << "\n";
  }
  return out.str();
}

IntMatrix g_family_exemplar(std::size_t n) {
  IntMatrix m = IntMatrix::identity(n);
  m(n - 2, n - 1) = 2;
  m(n - 1, n - 1) = 2;
  return m;
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::compute: return "compute";
    case Mode::verify: return "verify";
    case Mode::realize: return "realize";
    case Mode::batch: return "batch";
  }
  return "?";
}

std::string_view to_string(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::text: return "text";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::compute, Mode::verify, Mode::realize, Mode::batch})
    if (to_string(m) == s) return m;
  throw ParseError("unknown mode '" + std::string(s) + "'");
}

Format parse_format(std::string_view s) {
  for (Format f : {Format::json, Format::csv, Format::text})
    if (to_string(f) == s) return f;
  throw ParseError("unknown format '" + std::string(s) + "'");
}

std::vector<std::string> catalog_tags(std::size_t dim) {
  switch (dim) {
    case 0: throw DimensionError("dimension must be positive");
    case 1: return {"t1.antipodal"};
    case 2: return {"t2.tau1", "t2.tau2"};
    case 3: return {"t3.h1", "t3.h2", "t3.h3", "t3.h4"};
    default: return {"tn.tau1", "tn.tau2", "tn.tau3", "tn.tau4"};
  }
}

NumericOptions numeric_options(const RunConfig& cfg) {
  NumericOptions o;
  o.grid = cfg.grid;
  o.tol = cfg.tol;
  o.threads = cfg.threads;
  return o;
}

CaseResult verify_case(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts, std::size_t index) {
  CaseResult c;
  c.index = index;
  c.matrix = m;
  c.involution = involution_id(s);
  c.closed = closed_form_nbu(m, s);
  NBUReport rep;
  try {
    rep = nbu_first_principles(m, s, opts);
  } catch (const UnsupportedRealizer& e) {
    c.outcome = "unverified";
    c.reason = e.what();
    return c;
  } catch (const NumericError& e) {
    c.outcome = "disagree";
    c.reason = std::string("oracle failure: ") + e.what();
    return c;
  }
  c.first_principles = rep.nbu;
  c.points = rep.points.size();
  c.pairs = rep.coincidence_pair_count;
  c.construction = rep.realizer.construction;
  c.n0 = rep.realizer.n0;
  c.parity_ok = index_parity_check(rep.points, s, s.dimension(), opts.dedupe_radius * 10);

  bool agree = true;
  switch (c.closed.status) {
    case VerdictStatus::exact:
      agree = *c.closed.value == rep.nbu;
      if (!agree) c.reason = "closed form " + c.closed.value->get_str() + ", first principles " + rep.nbu.get_str();
      break;
    case VerdictStatus::conjectured:
      agree = std::find(c.closed.candidates.begin(), c.closed.candidates.end(), rep.nbu) != c.closed.candidates.end();
      c.reason = agree ? "first principles picks a conjectured candidate" : "first principles outside the candidates";
      break;
    case VerdictStatus::unknown:
      c.reason = "closed form unknown; first principles decides";
      break;
  }
  if (!c.parity_ok) {
    agree = false;
    c.reason = "index parity law violated";
  }
  c.outcome = agree ? "agree" : "disagree";
  return c;
}

std::vector<IntMatrix> random_matrices(std::size_t dim, std::size_t count, std::uint64_t seed, long lo, long hi) {
  if (lo > hi) throw std::invalid_argument("empty entry range");
  std::mt19937_64 rng(seed);
  // Plain modulo keeps the mapping identical across standard libraries.
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  std::vector<IntMatrix> out;
  for (std::size_t k = 0; k < count; ++k) {
    IntMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = lo + static_cast<long>(rng() % span);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::pair<IntMatrix, std::string>> branch_exemplars(std::size_t dim) {
  switch (dim) {
    case 1: return {{IntMatrix{{2}}, "t1.antipodal"}, {IntMatrix{{3}}, "t1.antipodal"}};
    case 2:
      return {{IntMatrix{{1, 0}, {0, 1}}, "t2.tau1"},
              {IntMatrix{{1, 0}, {0, 2}}, "t2.tau2"},
              {IntMatrix{{0, 1}, {0, 1}}, "t2.tau2"},
              {IntMatrix{{1, 0}, {0, 1}}, "t2.tau2"}};
    case 3: {
      const IntMatrix id = IntMatrix::identity(3);
      return {{id, "t3.h1"},
              {id, "t3.h3"},
              {id, "t3.h4"},
              {IntMatrix{{0, 0, 0}, {0, 1, 0}, {0, 0, 2}}, "t3.h2"},
              {id, "t3.h2"},
              {IntMatrix{{1, 0, 1}, {0, 1, 1}, {0, 0, 0}}, "t3.h2"},
              {IntMatrix{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}}, "t3.h2"},
              {IntMatrix{{1, 0, 0}, {0, 1, 0}, {1, 1, 2}}, "t3.h2"},
              {IntMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}, "t3.h2"},
              {IntMatrix{{1, 1, 0}, {0, 0, 0}, {1, 1, 0}}, "t3.h2"}};
    }
    default: {
      const IntMatrix id = IntMatrix::identity(dim);
      return {{id, "tn.tau1"}, {id, "tn.tau3"}, {id, "tn.tau4"}, {g_family_exemplar(dim), "tn.tau2"}, {id, "tn.tau2"}};
    }
  }
}

BatchSummary run_batch(const std::vector<std::pair<IntMatrix, FreeInvolution>>& cases, const NumericOptions& opts,
                       unsigned threads) {
  NumericOptions inner = opts;
  inner.threads = 1;
  std::vector<CaseResult> results(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      const auto& [m, s] = cases[i];
      try {
        results[i] = verify_case(m, s, inner, i);
      } catch (const std::exception& e) {
        results[i].index = i;
        results[i].matrix = m;
        results[i].involution = involution_id(s);
        results[i].outcome = "disagree";
        results[i].reason = std::string("error: ") + e.what();
      }
    }
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(cases.size(), 1)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BatchSummary s;
  s.cases_run = results.size();
  for (auto& r : results) {
    if (r.outcome == "agree") ++s.agreements;
    else if (r.outcome == "unverified") ++s.unverified;
    else s.disagreements.push_back(r.index);
    if (!r.closed.branch.empty()) ++s.coverage[r.closed.branch];
  }
  s.cases = std::move(results);
  return s;
}

Report error_report(std::string_view command, std::string_view kind, std::string_view message) {
  Report r;
  r.exit_code = 1;
  r.body["schema"] = kReportSchema;
  r.body["command"] = std::string(command);
  r.body["error"] = {{"kind", std::string(kind)}, {"message", std::string(message)}};
  return r;
}

Report cmd_compute(const IntMatrix& m, const FreeInvolution& s) {
  const ClosedFormVerdict v = closed_form_nbu(m, s);
  Report r;
  r.body["schema"] = kReportSchema;
  r.body["command"] = "compute";
  r.body["dimension"] = m.rows();
  r.body["matrix"] = m.to_text();
  r.body["involution"] = involution_json(s);
  r.body.update(verdict_json(v));
  return r;
}

Report cmd_verify(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts) {
  const CaseResult c = verify_case(m, s, opts);
  Report r;
  r.body["schema"] = kReportSchema;
  r.body["command"] = "verify";
  r.body["grid"] = opts.grid;
  r.body["case"] = case_json(c);
  r.body["agreement"] = c.outcome == "agree";
  r.exit_code = c.outcome == "disagree" ? 2 : 0;
  return r;
}

Report cmd_realize(const IntMatrix& m, const FreeInvolution& s, const NumericOptions& opts) {
  const NBUReport rep = nbu_first_principles(m, s, opts);
  Report r;
  auto& b = r.body;
  b["schema"] = kReportSchema;
  b["command"] = "realize";
  b["dimension"] = m.rows();
  b["matrix"] = m.to_text();
  b["involution"] = involution_json(s);
  b["branch"] = rep.realizer.branch;
  b["construction"] = rep.realizer.construction;
  b["n0"] = rep.realizer.n0;
  b["terms"] = ordered_json::array();
  for (const auto& t : rep.realizer.map.terms)
    b["terms"].push_back({{"target", t.target},
                          {"source", t.source},
                          {"amplitude", t.amplitude.get_str()},
                          {"half_frequency", t.half_frequency},
                          {"shift", t.shift.get_str()}});
  std::vector<std::size_t> owner(rep.points.size(), 0);
  for (std::size_t k = 0; k < rep.classes.size(); ++k)
    for (const auto& [x, sx] : rep.classes[k].pairs) owner[x] = owner[sx] = k;
  b["points"] = ordered_json::array();
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& p = rep.points[i];
    b["points"].push_back({{"point", i},
                           {"coords", p.coords},
                           {"exact", rational_json(p.snapped->coords())},
                           {"local_index", p.local_index},
                           {"usual_class", class_json(*p.usual_class)},
                           {"bu_class", owner[i]},
                           {"residual", p.residual}});
  }
  b["classes"] = ordered_json::array();
  for (const auto& c : rep.classes) {
    ordered_json cj;
    cj["kind"] = std::string(to_string(c.kind));
    cj["pairs"] = c.pairs;
    cj["usual_classes"] = ordered_json::array();
    for (const auto& u : c.usual_classes) cj["usual_classes"].push_back(class_json(u));
    cj["pseudo_index"] = int_json(c.pseudo_index);
    cj["essential"] = c.essential;
    b["classes"].push_back(cj);
  }
  b["nbu"] = int_json(rep.nbu);
  b["pair_count"] = rep.coincidence_pair_count;
  b["index_parity"] = index_parity_check(rep.points, s, s.dimension(), opts.dedupe_radius * 10);
  b["search"] = rep.diagnostics.search;
  b["retries"] = rep.diagnostics.retries;
  return r;
}

Report cmd_batch(std::size_t dim, const std::string& involution, const RunConfig& cfg, bool curated) {
  std::vector<std::size_t> dims;
  if (dim) dims.push_back(dim);
  else dims = {1, 2, 3, 4};

  std::vector<std::pair<IntMatrix, FreeInvolution>> cases;
  std::vector<std::string> expected_branches;
  for (std::size_t d : dims) {
    std::vector<std::string> tags;
    if (involution.empty()) tags = catalog_tags(d);
    else tags = {std::string(tag_id(resolve_tag(d, involution)))};
    if (curated) {
      for (auto& [m, tag] : branch_exemplars(d))
        if (std::find(tags.begin(), tags.end(), tag) != tags.end()) cases.emplace_back(m, catalog_involution(d, tag));
      for (const auto& b : closed_form_branches(d))
        for (const auto& tag : tags)
          if (b.starts_with(short_name(tag) + ".")) expected_branches.push_back(b);
    }
    for (const auto& m : random_matrices(d, cfg.count, cfg.seed, cfg.range_lo, cfg.range_hi))
      for (const auto& tag : tags) cases.emplace_back(m, catalog_involution(d, tag));
  }

  BatchSummary s = run_batch(cases, numeric_options(cfg), cfg.threads);
  for (const auto& b : expected_branches)
    if (!s.coverage.contains(b)) s.uncovered.push_back(b);

  Report r;
  auto& body = r.body;
  body["schema"] = kReportSchema;
  body["command"] = curated ? "batch" : "verify";
  body["dimensions"] = dims;
  body["involution"] = involution.empty() ? ordered_json("all") : ordered_json(involution);
  body["seed"] = cfg.seed;
  body["count"] = cfg.count;
  body["range"] = {cfg.range_lo, cfg.range_hi};
  body["grid"] = cfg.grid;
  body["summary"] = summary_json(s);
  body["disagreements"] = ordered_json::array();
  for (std::size_t i : s.disagreements) body["disagreements"].push_back(case_json(s.cases[i]));
  body["cases"] = ordered_json::array();
  for (const auto& c : s.cases) body["cases"].push_back(case_json(c));
  r.exit_code = s.disagreements.empty() && s.uncovered.empty() ? 0 : 2;
  return r;
}

namespace {

FreeInvolution involution_from(const RunConfig& cfg, std::size_t n) {
  if (!cfg.custom_linear.empty()) {
    const IntMatrix lin = parse_matrix(cfg.custom_linear, n);
    const RationalVector t = cfg.custom_translation.empty() ? RationalVector(n, Rational(0))
                                                            : parse_rational_vector(cfg.custom_translation, n);
    return custom_involution(AffineTorusMap(lin, t));
  }
  if (cfg.involution.empty()) throw ParseError("an involution is required");
  return catalog_involution(n, cfg.involution);
}

}  // namespace

Report run(const RunConfig& cfg) {
  const std::string command(to_string(cfg.mode));
  try {
    if (cfg.mode == Mode::batch) return cmd_batch(cfg.dimension, cfg.involution, cfg, true);
    if (cfg.mode == Mode::verify && cfg.matrix.empty()) {
      if (cfg.dimension == 0) throw ParseError("verify without a matrix needs a dimension");
      return cmd_batch(cfg.dimension, cfg.involution, cfg, false);
    }
    if (cfg.matrix.empty()) throw ParseError("a matrix is required");
    const IntMatrix m = parse_matrix(cfg.matrix, cfg.dimension);
    const FreeInvolution s = involution_from(cfg, m.rows());
    switch (cfg.mode) {
      case Mode::compute: return cmd_compute(m, s);
      case Mode::verify: return cmd_verify(m, s, numeric_options(cfg));
      default: return cmd_realize(m, s, numeric_options(cfg));
    }
  } catch (const ParseError& e) {
    return error_report(command, "parse", e.what());
  } catch (const DimensionError& e) {
    return error_report(command, "dimension", e.what());
  } catch (const InvolutionError& e) {
    return error_report(command, "involution", e.what());
  } catch (const UnsupportedInvolution& e) {
    return error_report(command, "unsupported", e.what());
  } catch (const UnsupportedRealizer& e) {
    return error_report(command, "unsupported", e.what());
  } catch (const NumericError& e) {
    Report r = error_report(command, "numeric", e.what());
    r.exit_code = 2;
    return r;
  } catch (const std::invalid_argument& e) {
    return error_report(command, "invalid", e.what());
  }
}

std::string render(const Report& r, Format f) {
  switch (f) {
    case Format::json: return r.body.dump(2) + "\n";
    case Format::csv: return render_csv(r.body);
    case Format::text: {
      std::ostringstream out;
      render_text(r.body, "", out);
      return out.str();
    }
  }
  return {};
}

}  // namespace nbu
