#include "nbu/closed_form.hpp"

namespace nbu {

namespace {

bool even(const Integer& v) { return mpz_even_p(v.get_mpz_t()) != 0; }

void require_dim(const IntMatrix& m, std::size_t dim, std::string_view what) {
  if (!m.is_square() || m.rows() != dim)
    throw DimensionError(std::string(what) + " needs a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
}

ClosedFormVerdict null_verdict(std::string branch) { return ClosedFormVerdict::exact(0, std::move(branch)); }

ClosedFormVerdict unknown(std::string branch) {
  ClosedFormVerdict v;
  v.status = VerdictStatus::unknown;
  v.branch = std::move(branch);
  return v;
}

}  // namespace

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::exact: return "exact";
    case VerdictStatus::conjectured: return "conjectured";
    case VerdictStatus::unknown: return "unknown";
  }
  return "?";
}

ClosedFormVerdict ClosedFormVerdict::exact(Integer v, std::string branch) {
  ClosedFormVerdict out;
  out.value = std::move(v);
  out.status = VerdictStatus::exact;
  out.branch = std::move(branch);
  return out;
}

ClosedFormVerdict nbu_t1(const Integer& a) {
  return even(a) ? ClosedFormVerdict::exact(1, "antipodal.even") : null_verdict("antipodal.odd");
}

bool bup_t2_tau2(const IntMatrix& m) {
  require_dim(m, 2, "bup_t2_tau2");
  const bool first_nonzero = m(0, 0) != 0 || m(1, 0) != 0;
  return first_nonzero && even(m(0, 1)) && even(m(1, 1));
}

ClosedFormVerdict nbu_t2(const IntMatrix& m, const FreeInvolution& tau) {
  require_dim(m, 2, "nbu_t2");
  switch (tau.tag) {
    case InvolutionTag::t2_tau1:
      return null_verdict("tau1.null");
    case InvolutionTag::t2_tau2:
      if (bup_t2_tau2(m)) return ClosedFormVerdict::exact(2, "tau2.bup");
      if (m(0, 0) == 0 && m(1, 0) == 0) return null_verdict("tau2.column1_zero");
      return null_verdict("tau2.column2_odd");
    default:
      throw UnsupportedInvolution("nbu_t2 supports only t2.tau1 and t2.tau2, got " + std::string(tag_id(tau.tag)));
  }
}

ClosedFormVerdict nbu_t3(const IntMatrix& m, const FreeInvolution& h) {
  require_dim(m, 3, "nbu_t3");
  const Integer &a = m(0, 0), &b = m(0, 1), &c = m(0, 2);
  const Integer &r = m(1, 0), &s = m(1, 1), &t = m(1, 2);
  const Integer &u = m(2, 0), &v = m(2, 1), &w = m(2, 2);
  const Integer p = r * v - s * u;
  const Integer q = a * v - b * u;
  const Integer o = a * s - b * r;

  ClosedFormVerdict out;
  switch (h.tag) {
    case InvolutionTag::t3_h1: out = null_verdict("h1.null"); break;
    case InvolutionTag::t3_h3: out = null_verdict("h3.null"); break;
    case InvolutionTag::t3_h4: out = null_verdict("h4.null"); break;
    case InvolutionTag::t3_h2: {
      const bool col1_zero = a == 0 && r == 0 && u == 0;
      const bool col2_zero = b == 0 && s == 0 && v == 0;
      const int odd = !even(c) + !even(t) + !even(w);
      if (col1_zero || col2_zero) {
        out = null_verdict("h2.degenerate_column");
      } else if (odd == 1) {
        out = null_verdict("h2.one_odd");
      } else if (odd == 2) {
        out = null_verdict("h2.two_odd");
      } else if (odd == 3) {
        out = null_verdict("h2.three_odd");
      } else if (p != 0 || q != 0) {
        out = ClosedFormVerdict::exact(4, "h2.even.pq_nonzero");
      } else if (u == 0) {
        out = ClosedFormVerdict::exact(4, "h2.even.pq_zero.u_zero");
      } else {
        out = null_verdict("h2.even.pq_zero.u_nonzero");
      }
      break;
    }
    default:
      throw UnsupportedInvolution("nbu_t3 supports only t3.h1..t3.h4, got " + std::string(tag_id(h.tag)));
  }
  // o is reported but never enters the branching.
  out.diagnostics = {{"p", p}, {"q", q}, {"o", o}};
  return out;
}

bool is_g_family(const IntMatrix& m) {
  if (!m.is_square() || m.rows() < 2) return false;
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j)
      if (m(i, j) != (i == j ? 1 : 0)) return false;
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (m(n - 1, j) != 0) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (!even(m(i, n - 1))) return false;
  return true;
}

ClosedFormVerdict nbu_tn(const IntMatrix& m, const FreeInvolution& tau) {
  if (!m.is_square() || m.rows() <= 3) throw DimensionError("nbu_tn needs n > 3");
  const std::size_t n = m.rows();
  switch (tau.tag) {
    case InvolutionTag::tn_tau1: return null_verdict("tn.tau1.null");
    case InvolutionTag::tn_tau3: return null_verdict("tn.tau3.null");
    case InvolutionTag::tn_tau4: return null_verdict("tn.tau4.null");
    case InvolutionTag::tn_tau2: {
      Integer top;
      mpz_ui_pow_ui(top.get_mpz_t(), 2, n - 1);
      if (is_g_family(m)) return ClosedFormVerdict::exact(top, "tn.tau2.g_family");
      ClosedFormVerdict v;
      v.status = VerdictStatus::conjectured;
      v.branch = "tn.tau2.conjectured";
      v.candidates = {Integer(0), top};
      return v;
    }
    default:
      throw UnsupportedInvolution("nbu_tn supports only tn.tau1..tn.tau4, got " + std::string(tag_id(tau.tag)));
  }
}

namespace {

ClosedFormVerdict catalog_dispatch(const IntMatrix& m, const FreeInvolution& tau) {
  switch (m.rows()) {
    case 1:
      if (tau.tag != InvolutionTag::t1_antipodal) throw UnsupportedInvolution("T^1 has only the antipodal involution");
      return nbu_t1(m(0, 0));
    case 2: return nbu_t2(m, tau);
    case 3: return nbu_t3(m, tau);
    default: return nbu_tn(m, tau);
  }
}

// Catalog entry with exactly the same linear part and translation, if any.
std::optional<FreeInvolution> exact_catalog_match(const FreeInvolution& tau) {
  const std::size_t n = tau.dimension();
  for (auto tag : {InvolutionTag::t1_antipodal, InvolutionTag::t2_tau1, InvolutionTag::t2_tau2,
                   InvolutionTag::t3_h1, InvolutionTag::t3_h2, InvolutionTag::t3_h3, InvolutionTag::t3_h4,
                   InvolutionTag::tn_tau1, InvolutionTag::tn_tau2, InvolutionTag::tn_tau3, InvolutionTag::tn_tau4}) {
    FreeInvolution cand;
    try {
      cand = catalog_involution(n, tag);
    } catch (const InvolutionError&) {
      continue;
    }
    if (cand.map == tau.map) return cand;
  }
  return std::nullopt;
}

Integer trace(const IntMatrix& m) {
  Integer t = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

}  // namespace

ClosedFormVerdict closed_form_nbu(const IntMatrix& m, const FreeInvolution& tau) {
  if (!m.is_square() || m.rows() != tau.dimension())
    throw DimensionError("matrix and involution dimensions differ");
  if (tau.tag != InvolutionTag::custom) return catalog_dispatch(m, tau);

  if (auto match = exact_catalog_match(tau)) {
    ClosedFormVerdict v = catalog_dispatch(m, *match);
    v.branch = "custom=" + std::string(tag_id(match->tag)) + "." + v.branch;
    return v;
  }
  // Conjugation by a homeomorphism h turns NBU(f, h tau h^-1) into
  // NBU(f o h, tau). Where the whole equivalence class has a constant value
  // the matrix does not need to be transported.
  const std::size_t n = m.rows();
  const bool preserves = tau.orientation == Orientation::preserves;
  if (n == 2 && preserves) return null_verdict("custom.t2.tau1_class");
  if (n == 3 && !preserves) return null_verdict("custom.t3.h3_h4_class");
  if (n == 3 && trace(tau.linear()) == 3) return null_verdict("custom.t3.h1_class");
  if (n == 2) return unknown("custom.t2.tau2_class.unmatched");
  if (n == 3) return unknown("custom.t3.h2_class.unmatched");
  return unknown("custom.unmatched");
}

std::vector<std::string> closed_form_branches(std::size_t dim) {
  switch (dim) {
    case 1: return {"antipodal.even", "antipodal.odd"};
    case 2: return {"tau1.null", "tau2.bup", "tau2.column1_zero", "tau2.column2_odd"};
    case 3:
      return {"h1.null", "h3.null", "h4.null", "h2.degenerate_column", "h2.one_odd", "h2.two_odd",
              "h2.three_odd", "h2.even.pq_nonzero", "h2.even.pq_zero.u_zero", "h2.even.pq_zero.u_nonzero"};
    default:
      return {"tn.tau1.null", "tn.tau3.null", "tn.tau4.null", "tn.tau2.g_family", "tn.tau2.conjectured"};
  }
}

}  // namespace nbu
