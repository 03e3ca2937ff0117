#include <doctest.h>

#include <cmath>

#include "nbu/closed_form.hpp"
#include "nbu/coincidence.hpp"
#include "oracles.hpp"

using namespace nbu;

namespace {

const Rational half(1, 2);

std::vector<RationalVector> exact_points(const NBUReport& r) {
  std::vector<RationalVector> out;
  for (const auto& p : r.points) out.push_back(p.snapped->coords());
  return out;
}

// Sign of det of a central-difference Jacobian of x -> f'(x) - f'(s(x)),
// evaluated through PerturbedMap::evaluate only.
int finite_difference_index(const PerturbedMap& f, const FreeInvolution& s, std::vector<double> x) {
  const std::size_t n = x.size();
  auto g = [&](const std::vector<double>& y) {
    std::vector<double> sy(n);
    for (std::size_t i = 0; i < n; ++i) {
      sy[i] = s.translation()[i].get_d();
      for (std::size_t j = 0; j < n; ++j) sy[i] += s.linear()(i, j).get_d() * y[j];
    }
    auto a = f.evaluate(y), b = f.evaluate(sy);
    for (std::size_t i = 0; i < n; ++i) a[i] -= b[i];
    return a;
  };
  const double h = 1e-6;
  std::vector<std::vector<double>> jac(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    auto xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const auto gp = g(xp), gm = g(xm);
    for (std::size_t i = 0; i < n; ++i) jac[i][j] = (gp[i] - gm[i]) / (2 * h);
  }
  double det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(jac[r][c]) > std::fabs(jac[p][c])) p = r;
    if (p != c) {
      std::swap(jac[p], jac[c]);
      det = -det;
    }
    det *= jac[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = jac[r][c] / jac[c][c];
      for (std::size_t k = c; k < n; ++k) jac[r][k] -= m * jac[c][k];
    }
  }
  return det > 0 ? 1 : -1;
}

CoincidencePoint point(std::vector<double> x, int index, long cls) {
  CoincidencePoint p;
  p.coords = std::move(x);
  p.local_index = index;
  p.usual_class = IntegerVector{cls};
  return p;
}

}  // namespace

TEST_CASE("perturbation terms") {
  const PerturbationTerm eps{0, 0, Rational(1, 3), 2, 0};
  const PerturbationTerm delta{0, 0, Rational(1, 5), 1, 0};
  for (double t : {0.0, 1.0, 0.5}) CHECK(std::fabs(eps.value(t)) < 1e-15);
  CHECK(eps.value(0.25) == doctest::Approx(1.0 / 3));
  CHECK(delta.value(0.5) == doctest::Approx(0.2));
  CHECK(delta.value(-0.5) == doctest::Approx(0.2));
  CHECK(delta.value(0.0) == doctest::Approx(0.0));
  CHECK(eps.smooth());
  CHECK(!delta.smooth());
  CHECK(std::isinf(eps.corner_distance(0.0)));
  CHECK(delta.corner_distance(0.9) == doctest::Approx(0.1));
}

TEST_CASE("exact coincidence loci of linear maps") {
  SUBCASE("even degree covers the circle") {
    const auto c = coincidence_set_affine(AffineTorusMap::linear_map(IntMatrix{{2}}), catalog_involution(1, "antipodal"));
    CHECK(c.kind == SolutionSet::Kind::all);
  }
  SUBCASE("odd degree misses") {
    CHECK(coincidence_set_affine(AffineTorusMap::linear_map(IntMatrix{{3}}), catalog_involution(1, "antipodal")).empty());
  }
  SUBCASE("four circles for (2x, 0)") {
    const auto c = coincidence_set_affine(AffineTorusMap::linear_map(IntMatrix{{2, 0}, {0, 0}}), catalog_involution(2, "tau2"));
    CHECK(c.subtorus_dimension() == 1);
    REQUIRE(c.component_count() == 4);
    std::vector<Rational> xs;
    for (const auto& t : c.translates) xs.push_back(t[0]);
    std::sort(xs.begin(), xs.end());
    CHECK(xs == std::vector<Rational>{0, Rational(1, 4), half, Rational(3, 4)});
  }
}

TEST_CASE("usual classes of linear coincidences") {
  const auto f = AffineTorusMap::linear_map(IntMatrix{{2, 0}, {0, 0}});
  const auto s = catalog_involution(2, "tau2");
  const auto a = usual_class_of(TorusPoint({0, Rational(3, 10)}), f, s);
  const auto b = usual_class_of(TorusPoint({0, Rational(7, 10)}), f, s);
  const auto c = usual_class_of(TorusPoint({Rational(1, 4), Rational(3, 10)}), f, s);
  CHECK(a == b);
  CHECK(a != c);
  // Coin is the whole circle for 2x: one class only.
  const auto g = AffineTorusMap::linear_map(IntMatrix{{2}});
  const auto s1 = catalog_involution(1, "antipodal");
  CHECK(usual_class_of(TorusPoint({Rational(1, 7)}), g, s1) == usual_class_of(TorusPoint({Rational(5, 9)}), g, s1));
  CHECK_THROWS_AS(usual_class_of(TorusPoint({Rational(1, 7), 0}), f, s), NumericError);
}

TEST_CASE("realizer constructions") {
  SUBCASE("circle") {
    const auto r = build_realizer(IntMatrix{{2}}, catalog_involution(1, "antipodal"));
    CHECK(r.n0 == 3);
    REQUIRE(r.map.terms.size() == 1);
    CHECK(r.map.terms[0] == PerturbationTerm{0, 0, Rational(1, 3), 2, 0});
  }
  SUBCASE("diag(1,2) under tau2: x + eps(y), 2y + eps(x)") {
    const auto r = build_realizer(IntMatrix{{1, 0}, {0, 2}}, catalog_involution(2, "tau2"));
    REQUIRE(r.map.terms.size() == 2);
    CHECK(r.map.terms[0].target == 0);
    CHECK(r.map.terms[0].source == 1);
    CHECK(r.map.terms[1].target == 1);
    CHECK(r.map.terms[1].source == 0);
    CHECK(r.branch == "tau2.bup");
    CHECK(r.construction == "chain");
  }
  SUBCASE("identity under h2") {
    const auto r = build_realizer(IntMatrix::identity(3), catalog_involution(3, "h2"));
    REQUIRE(r.map.terms.size() == 3);
    // eps(y) into x, eps(z) into y, eps(x) into z.
    CHECK(r.map.terms[0].target == 1);
    CHECK(r.map.terms[0].source == 2);
    CHECK(r.map.terms[1].target == 0);
    CHECK(r.map.terms[1].source == 1);
    CHECK(r.map.terms[2].target == 2);
    CHECK(r.map.terms[2].source == 0);
  }
  SUBCASE("unsupported cases") {
    CHECK_THROWS_AS(build_realizer(IntMatrix::identity(4), catalog_involution(4, "tau2")), UnsupportedRealizer);
    const auto s = custom_involution(AffineTorusMap(IntMatrix{{1, 0}, {0, -1}}, {half, 0}));
    // Unmatched by the closed form, but the linear map already misses: x = x + 1/2 has no solution.
    const auto r = build_realizer(IntMatrix{{1, 0}, {0, 2}}, s);
    CHECK(r.construction == "parity_obstruction");
    CHECK(r.map.terms.empty());
  }
}

TEST_CASE("numeric coincidences of the realizers") {
  SUBCASE("circle") {
    const auto s = catalog_involution(1, "antipodal");
    const auto r = build_realizer(IntMatrix{{2}}, s);
    const auto pts = find_coincidences_numeric(r.map, s);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].coords[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pts[1].coords[0] == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("plane torus") {
    const auto s = catalog_involution(2, "tau2");
    const auto rep = nbu_first_principles(IntMatrix{{1, 0}, {0, 2}}, s);
    CHECK(exact_points(rep) ==
          std::vector<RationalVector>{{0, 0}, {0, half}, {half, 0}, {half, half}});
  }
  SUBCASE("identity under h2 is empty") {
    const auto s = catalog_involution(3, "h2");
    CHECK(nbu_first_principles(IntMatrix::identity(3), s).points.empty());
  }
  SUBCASE("diag(1,1,2) under h2 has the 8 half-lattice points") {
    const auto s = catalog_involution(3, "h2");
    const auto rep = nbu_first_principles(IntMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}, s);
    CHECK(rep.points.size() == 8);
    CHECK(rep.nbu == 4);
    for (const auto& c : rep.classes) CHECK(c.kind == ClassKind::single);
  }
  SUBCASE("a positive-dimensional locus is rejected") {
    // Unperturbed 2x on the circle: every point is a coincidence.
    PerturbedMap p{AffineTorusMap::linear_map(IntMatrix{{2}}), {}};
    CHECK_THROWS_AS(find_coincidences_numeric(p, catalog_involution(1, "antipodal")), NumericError);
  }
}

TEST_CASE("local indices") {
  const auto s = catalog_involution(2, "tau2");
  const auto r = build_realizer(IntMatrix{{1, 0}, {0, 2}}, s);
  CHECK(local_index_numeric(r.map, s, std::vector<double>{0, 0}) == -1);
  CHECK(local_index_numeric(r.map, s, std::vector<double>{0, 0.5}) == 1);
  CHECK(local_index_numeric(r.map, s, std::vector<double>{0.5, 0}) == 1);
  CHECK(local_index_numeric(r.map, s, std::vector<double>{0.5, 0.5}) == -1);

  SUBCASE("analytic Jacobian agrees with finite differences") {
    std::mt19937_64 rng(5);
    for (const char* tag : {"h2", "h4"}) {
      const auto s3 = catalog_involution(3, tag);
      for (int k = 0; k < 20; ++k) {
        const IntMatrix m = oracle::random_matrix(rng, 3, -3, 3);
        Realizer real;
        try {
          real = build_realizer(m, s3);
        } catch (const UnsupportedRealizer&) {
          continue;
        }
        for (const auto& x : half_lattice(3)) {
          int analytic = 0;
          try {
            analytic = local_index_numeric(real.map, s3, x);
          } catch (const NumericError&) {
            continue;
          }
          CHECK(analytic == finite_difference_index(real.map, s3, x));
        }
      }
    }
  }
  SUBCASE("circle indices are opposite") {
    const auto s1 = catalog_involution(1, "antipodal");
    const auto r1 = build_realizer(IntMatrix{{2}}, s1);
    const int a = local_index_numeric(r1.map, s1, std::vector<double>{0.0});
    const int b = local_index_numeric(r1.map, s1, std::vector<double>{0.5});
    CHECK(a == -b);
    CHECK(a == finite_difference_index(r1.map, s1, {0.0}));
  }
}

TEST_CASE("pairing and pseudo-indices") {
  SUBCASE("Figure 1 classes") {
    const auto s = catalog_involution(2, "tau2");
    const auto rep = nbu_first_principles(IntMatrix{{1, 0}, {0, 2}}, s);
    REQUIRE(rep.classes.size() == 2);
    for (const auto& c : rep.classes) {
      CHECK(c.kind == ClassKind::single);
      CHECK(c.pseudo_index == 1);
      CHECK(c.essential);
      CHECK(c.pairs.size() == 1);
    }
    CHECK(rep.classes[0].pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(rep.classes[1].pairs[0] == std::pair<std::size_t, std::size_t>{2, 3});
    CHECK(index_parity_check(rep.points, s, 2));
  }
  SUBCASE("circle single class") {
    const auto s = catalog_involution(1, "antipodal");
    const auto rep = nbu_first_principles(IntMatrix{{2}}, s);
    REQUIRE(rep.classes.size() == 1);
    CHECK(rep.classes[0].pseudo_index == 1);
  }
  SUBCASE("empty input") {
    const auto s = catalog_involution(2, "tau2");
    CHECK(bu_pairing({}, s).empty());
    CHECK(index_parity_check({}, s, 2));
  }
  SUBCASE("representative and label independence") {
    // Hand-built points on T^2 under tau2 (reverses, n even: mod 2 / |.| branches).
    const auto s = catalog_involution(2, "tau2");
    std::vector<CoincidencePoint> pts = {point({0, 0}, 1, 0), point({0, 0.5}, -1, 1),
                                         point({0.5, 0}, 1, 0), point({0.5, 0.5}, -1, 1)};
    auto classes = bu_pairing(pts, s);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].kind == ClassKind::double_class);
    const Integer base = pseudo_index(classes[0], pts, 2, s.orientation);
    CHECK(base == 2);
    for (auto& [x, sx] : classes[0].pairs) std::swap(x, sx);
    CHECK((pseudo_index(classes[0], pts, 2, s.orientation) != 0) == (base != 0));
    // A double class whose C1 index vanishes is inessential.
    pts[2].local_index = -1;
    pts[3].local_index = 1;
    classes = bu_pairing(pts, s);
    CHECK(pseudo_index(classes[0], pts, 2, s.orientation) == 0);
  }
  SUBCASE("halving branch and missing indices") {
    const auto s = catalog_involution(2, "tau1");
    std::vector<CoincidencePoint> pts = {point({0, 0}, 1, 0), point({0.5, 0}, 1, 0)};
    pts[1].local_index = -1;
    auto classes = bu_pairing(pts, s);
    CHECK(pseudo_index(classes[0], pts, 2, s.orientation) == 0);
    pts[1].local_index = 0;
    CHECK_THROWS_AS(pseudo_index(classes[0], pts, 2, s.orientation), NumericError);
  }
  SUBCASE("unpaired points are rejected") {
    const auto s = catalog_involution(2, "tau2");
    std::vector<CoincidencePoint> pts = {point({0, 0}, 1, 0)};
    CHECK_THROWS_AS(bu_pairing(pts, s), NumericError);
    CHECK(!index_parity_check(pts, s, 2));
  }
}

TEST_CASE("g-family placement") {
  IntMatrix g = IntMatrix::identity(4);
  g(3, 3) = 2;
  const auto s = catalog_involution(4, "tau2");
  const auto rep = nbu_first_principles(g, s);
  CHECK(rep.points.size() == 16);
  CHECK(rep.coincidence_pair_count == 8);
  CHECK(rep.nbu == 8);
  CHECK(rep.diagnostics.search == "placement");
  CHECK(rep.diagnostics.residual_max < 1e-8);
}

TEST_CASE("helpers") {
  CHECK(half_lattice(2).size() == 4);
  CHECK(half_lattice(3)[1] == std::vector<double>{0, 0, 0.5});
  const auto p = snap_point(std::vector<double>{0.2500000001, 0.9999999999}, 8, 1e-6);
  REQUIRE(p);
  CHECK(p->coords() == RationalVector{Rational(1, 4), 0});
  CHECK(!snap_point(std::vector<double>{0.1234}, 8, 1e-6));
  CHECK(torus_distance(std::vector<double>{0.999}, std::vector<double>{0.001}) == doctest::Approx(0.002));
}

TEST_CASE("scan is independent of the thread count") {
  const auto s = catalog_involution(3, "h2");
  const auto r = build_realizer(IntMatrix{{2, 1, 0}, {1, 3, 2}, {0, 1, 4}}, s);
  NumericOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = find_coincidences_numeric(r.map, s, one);
  const auto b = find_coincidences_numeric(r.map, s, four);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].coords == b[i].coords);
}
