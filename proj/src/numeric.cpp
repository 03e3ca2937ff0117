#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "nbu/coincidence.hpp"

namespace nbu {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxStackDim = 64;

double frac_d(double t) { return t - std::floor(t); }

// Gaussian elimination with partial pivoting on a copy of `a` (n x n,
// row-major). Solves a x = b in place of b and returns det(a).
double solve_in_place(std::vector<double> a, std::span<double> b, std::size_t n) {
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
      det = -det;
    }
    const double p = a[c * n + c];
    det *= p;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / p;
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double v = b[c];
    for (std::size_t k = c + 1; k < n; ++k) v -= a[c * n + k] * b[k];
    b[c] = v / a[c * n + c];
  }
  return det;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

struct NewtonResult {
  std::vector<double> x;
  double residual = 0.0;
  bool converged = false;
};

// Damped Newton for g(x) = k, with k the integer vector nearest g(start).
NewtonResult newton(const CoincidenceFunction& g, std::span<const double> start, double tol) {
  const std::size_t n = g.dimension();
  NewtonResult out;
  out.x.assign(start.begin(), start.end());
  std::vector<double> val(n), k(n), jac(n * n), step(n), trial(n), tval(n);
  g.residual(out.x, val);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = std::nearbyint(val[i]);
    val[i] -= k[i];
  }
  double err = max_abs(val);
  for (int it = 0; it < 40 && err > tol; ++it) {
    g.jacobian(out.x, jac);
    for (std::size_t i = 0; i < n; ++i) step[i] = -val[i];
    if (std::fabs(solve_in_place(jac, step, n)) < 1e-14) break;
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 12; ++half, lambda *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = out.x[i] + lambda * step[i];
      g.residual(trial, tval);
      for (std::size_t i = 0; i < n; ++i) tval[i] -= k[i];
      const double terr = max_abs(tval);
      if (terr < err) {
        out.x = trial;
        val = tval;
        err = terr;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.residual = err;
  out.converged = err <= tol;
  for (double& c : out.x) {
    c = frac_d(c);
    if (c > 1.0 - 1e-9) c = 0.0;
  }
  return out;
}

// Sorts lexicographically and drops points within `radius` of an earlier one.
std::vector<CoincidencePoint> dedupe(std::vector<CoincidencePoint> pts, double radius) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.coords < b.coords; });
  std::vector<CoincidencePoint> kept;
  for (auto& p : pts) {
    bool dup = false;
    for (const auto& q : kept)
      if (torus_distance(p.coords, q.coords) < radius) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(p));
  }
  return kept;
}

void check_isolated(const CoincidenceFunction& g, std::vector<CoincidencePoint>& pts, const NumericOptions& opts) {
  if (pts.size() > opts.max_points)
    throw NumericError(NumericError::Kind::non_isolated,
                       "more than " + std::to_string(opts.max_points) + " coincidence points; set is not isolated");
  const std::size_t n = g.dimension();
  std::vector<double> jac(n * n), rhs(n, 0.0);
  for (const auto& p : pts) {
    g.jacobian(p.coords, jac);
    if (std::fabs(solve_in_place(jac, rhs, n)) < opts.degeneracy_tol)
      throw NumericError(NumericError::Kind::non_isolated, "degenerate coincidence at " + std::to_string(p.coords[0]));
  }
}

}  // namespace

double PerturbationTerm::value(double t) const {
  return amplitude.get_d() * std::sin(kPi * half_frequency * frac_d(t + shift.get_d()));
}

double PerturbationTerm::derivative(double t) const {
  return amplitude.get_d() * kPi * half_frequency * std::cos(kPi * half_frequency * frac_d(t + shift.get_d()));
}

double PerturbationTerm::corner_distance(double t) const {
  if (smooth()) return std::numeric_limits<double>::infinity();
  const double u = frac_d(t + shift.get_d());
  return std::min(u, 1.0 - u);
}

std::vector<double> PerturbedMap::evaluate(std::span<const double> x) const {
  const std::size_t n = dimension();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = base.translation[i].get_d();
    for (std::size_t j = 0; j < n; ++j) v += base.linear(i, j).get_d() * x[j];
    out[i] = v;
  }
  for (const auto& t : terms) out[t.target] += t.value(x[t.source]);
  return out;
}

CoincidenceFunction::CoincidenceFunction(const PerturbedMap& map, const FreeInvolution& s)
    : n_(map.dimension()) {
  if (s.dimension() != n_) throw DimensionError("map and involution dimensions differ");
  if (n_ > kMaxStackDim) throw DimensionError("dimension above " + std::to_string(kMaxStackDim));
  const IntMatrix l = coincidence_matrix(map.base.linear, s);
  const RationalVector at = map.base.linear * s.translation();
  linear_.resize(n_ * n_);
  s_linear_.resize(n_ * n_);
  constant_.resize(n_);
  s_shift_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    constant_[i] = at[i].get_d();
    s_shift_[i] = s.translation()[i].get_d();
    for (std::size_t j = 0; j < n_; ++j) {
      linear_[i * n_ + j] = l(i, j).get_d();
      s_linear_[i * n_ + j] = s.linear()(i, j).get_d();
    }
  }
  lipschitz_.resize(n_ * n_);
  for (std::size_t i = 0; i < n_ * n_; ++i) lipschitz_[i] = std::fabs(linear_[i]);
  for (const auto& t : map.terms) {
    terms_.push_back({t.target, t.source, t.amplitude.get_d(), kPi * t.half_frequency, t.shift.get_d()});
    const double slope = std::fabs(terms_.back().amplitude) * kPi * t.half_frequency;
    for (std::size_t j = 0; j < n_; ++j)
      lipschitz_[t.target * n_ + j] += slope * ((t.source == j ? 1.0 : 0.0) + std::fabs(s_linear_[t.source * n_ + j]));
  }
}

double CoincidenceFunction::Term::value(double t) const {
  return amplitude * std::sin(frequency * frac_d(t + shift));
}

double CoincidenceFunction::Term::derivative(double t) const {
  return amplitude * frequency * std::cos(frequency * frac_d(t + shift));
}

std::vector<double> CoincidenceFunction::involution(std::span<const double> x) const {
  std::vector<double> y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double v = s_shift_[i];
    for (std::size_t j = 0; j < n_; ++j) v += s_linear_[i * n_ + j] * x[j];
    y[i] = frac_d(v);
  }
  return y;
}

void CoincidenceFunction::residual(std::span<const double> x, std::span<double> g) const {
  double y[kMaxStackDim];
  for (std::size_t i = 0; i < n_; ++i) {
    double v = -constant_[i], w = s_shift_[i];
    for (std::size_t j = 0; j < n_; ++j) {
      v += linear_[i * n_ + j] * x[j];
      w += s_linear_[i * n_ + j] * x[j];
    }
    g[i] = v;
    y[i] = w;
  }
  for (const auto& t : terms_) g[t.target] += t.value(x[t.source]) - t.value(y[t.source]);
}

void CoincidenceFunction::jacobian(std::span<const double> x, std::span<double> jac) const {
  std::copy(linear_.begin(), linear_.end(), jac.begin());
  if (terms_.empty()) return;
  double y[kMaxStackDim];
  for (std::size_t i = 0; i < n_; ++i) {
    double w = s_shift_[i];
    for (std::size_t j = 0; j < n_; ++j) w += s_linear_[i * n_ + j] * x[j];
    y[i] = w;
  }
  for (const auto& t : terms_) {
    const double dx = t.derivative(x[t.source]);
    const double dy = t.derivative(y[t.source]);
    jac[t.target * n_ + t.source] += dx;
    for (std::size_t j = 0; j < n_; ++j) jac[t.target * n_ + j] -= dy * s_linear_[t.source * n_ + j];
  }
}

int local_index_numeric(const PerturbedMap& p, const FreeInvolution& s, std::span<const double> x,
                        double degeneracy_tol) {
  const CoincidenceFunction g(p, s);
  const std::vector<double> sx = g.involution(x);
  for (const auto& t : p.terms)
    if (std::min(t.corner_distance(x[t.source]), t.corner_distance(sx[t.source])) < 1e-7)
      throw NumericError(NumericError::Kind::corner, "coincidence on a non-smooth point of the realizer");
  const std::size_t n = g.dimension();
  std::vector<double> jac(n * n), rhs(n, 0.0);
  g.jacobian(x, jac);
  const double det = solve_in_place(jac, rhs, n);
  if (std::fabs(det) < degeneracy_tol)
    throw NumericError(NumericError::Kind::degenerate_jacobian, "degenerate local index");
  return det > 0 ? 1 : -1;
}

std::vector<CoincidencePoint> find_coincidences_numeric(const PerturbedMap& p, const FreeInvolution& s,
                                                        const NumericOptions& opts) {
  const CoincidenceFunction g(p, s);
  const std::size_t n = g.dimension();
  const std::size_t grid = std::max<std::size_t>(opts.grid, 16);
  std::size_t cells = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (cells > (std::size_t{1} << 26) / grid) throw DimensionError("grid search too large for this dimension");
    cells *= grid;
  }
  const double h = 1.0 / static_cast<double>(grid);
  // Bound on |g_i(x) - g_i(center)| over a cell.
  std::vector<double> slack(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) slack[i] += g.lipschitz()[i * n + j] * h / 2;

  auto scan = [&](std::size_t lo, std::size_t hi, std::vector<CoincidencePoint>& out) {
    std::vector<double> x(n), val(n);
    for (std::size_t cell = lo; cell < hi; ++cell) {
      std::size_t rest = cell;
      for (std::size_t k = n; k-- > 0;) {
        x[k] = (static_cast<double>(rest % grid) + 0.5) * h;
        rest /= grid;
      }
      g.residual(x, val);
      bool pass = true;
      for (std::size_t i = 0; i < n && pass; ++i)
        pass = std::fabs(val[i] - std::nearbyint(val[i])) <= slack[i] + 1e-12;
      if (!pass) continue;
      NewtonResult r = newton(g, x, opts.tol);
      if (!r.converged) continue;
      CoincidencePoint pt;
      pt.coords = std::move(r.x);
      pt.residual = r.residual;
      out.push_back(std::move(pt));
      if (out.size() > 64 * opts.max_points) return;
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
  std::vector<std::vector<CoincidencePoint>> chunks(threads);
  if (threads == 1) {
    scan(0, cells, chunks[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(scan, cells * t / threads, cells * (t + 1) / threads, std::ref(chunks[t]));
    for (auto& th : pool) th.join();
  }
  std::vector<CoincidencePoint> all;
  for (auto& c : chunks)
    for (auto& pt : c) all.push_back(std::move(pt));
  all = dedupe(std::move(all), opts.dedupe_radius);
  check_isolated(g, all, opts);
  return all;
}

std::vector<CoincidencePoint> place_coincidences(const PerturbedMap& p, const FreeInvolution& s,
                                                 std::span<const std::vector<double>> candidates,
                                                 const NumericOptions& opts) {
  const CoincidenceFunction g(p, s);
  std::vector<CoincidencePoint> found;
  for (const auto& c : candidates) {
    NewtonResult r = newton(g, c, std::max(opts.tol, 1e-12));
    if (!r.converged || r.residual >= 1e-8) continue;
    CoincidencePoint pt;
    pt.coords = std::move(r.x);
    pt.residual = r.residual;
    found.push_back(std::move(pt));
  }
  found = dedupe(std::move(found), opts.dedupe_radius);
  check_isolated(g, found, opts);
  return found;
}

std::vector<std::vector<double>> half_lattice(std::size_t n) {
  if (n >= 24) throw DimensionError("half lattice too large");
  std::vector<std::vector<double>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> (n - 1 - i)) & 1 ? 0.5 : 0.0;
    out.push_back(std::move(x));
  }
  return out;
}

std::optional<TorusPoint> snap_point(std::span<const double> x, unsigned max_den, double radius) {
  RationalVector q(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = frac_d(x[i]);
    bool hit = false;
    for (unsigned d = 1; d <= max_den && !hit; ++d) {
      const double num = std::nearbyint(v * d);
      if (std::fabs(v - num / d) < radius) {
        q[i] = Rational(static_cast<long>(num), d);
        q[i].canonicalize();
        hit = true;
      }
    }
    if (!hit) return std::nullopt;
  }
  return TorusPoint(std::move(q));
}

}  // namespace nbu
