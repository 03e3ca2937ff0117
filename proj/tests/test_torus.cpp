#include <doctest.h>

#include "nbu/torus.hpp"

using namespace nbu;

namespace {

const Rational half(1, 2);

AffineTorusMap affine(IntMatrix m, RationalVector t) { return AffineTorusMap(std::move(m), std::move(t)); }

}  // namespace

TEST_CASE("torus points reduce mod 1") {
  const TorusPoint p({Rational(-1, 4), Rational(3, 2)});
  CHECK(p[0] == Rational(3, 4));
  CHECK(p[1] == half);
}

TEST_CASE("composition") {
  SUBCASE("identity on the left") {
    const auto g = affine(IntMatrix{{2, 1}, {0, 3}}, {half, Rational(1, 3)});
    CHECK(compose(AffineTorusMap::linear_map(IntMatrix::identity(2)), g) == g);
  }
  SUBCASE("doubling after the antipodal map") {
    const auto fs = compose(AffineTorusMap::linear_map(IntMatrix{{2}}), catalog_involution(1, "antipodal").map);
    CHECK(fs.linear == IntMatrix{{2}});
    CHECK(fs.translation[0] == 0);
  }
  SUBCASE("(px + 2ky, 2ly) after tau2") {
    // p = 3, k = 1, l = 1: (f o tau2)(x, y) = (-3x + 2y + 1, 2y + 1) = (-3x + 2y, 2y) mod 1.
    const auto f = AffineTorusMap::linear_map(IntMatrix{{3, 2}, {0, 2}});
    const auto fs = compose(f, catalog_involution(2, "tau2").map);
    CHECK(fs.linear == IntMatrix{{-3, 2}, {0, 2}});
    CHECK(fs.translation == TorusPoint({0, 0}));
  }
}

TEST_CASE("catalog involutions") {
  SUBCASE("h2") {
    const auto s = catalog_involution(3, "h2");
    CHECK(s.linear() == IntMatrix{{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}});
    CHECK(s.translation() == RationalVector{0, 0, half});
    CHECK(s.orientation == Orientation::preserves);
    CHECK(s.tag == InvolutionTag::t3_h2);
  }
  SUBCASE("tau2 on the plane torus") {
    const auto s = catalog_involution(2, "t2.tau2");
    CHECK(s.linear() == IntMatrix{{-1, 0}, {0, 1}});
    CHECK(s.translation() == RationalVector{0, half});
    CHECK(s.orientation == Orientation::reverses);
  }
  SUBCASE("antipodal") {
    const auto s = catalog_involution(1, "antipodal");
    CHECK(s.linear() == IntMatrix{{1}});
    CHECK(s.translation()[0] == half);
  }
  SUBCASE("h4") {
    const auto s = catalog_involution(3, "h4");
    CHECK(s.linear() == IntMatrix{{1, 1, 0}, {0, -1, 0}, {0, 0, 1}});
    CHECK(validate_free_involution(s.map) == InvolutionVerdict::ok);
    CHECK(s.orientation == Orientation::reverses);
  }
  SUBCASE("every catalog entry is free and has the declared orientation") {
    for (std::size_t n = 1; n <= 6; ++n)
      for (auto name : {"antipodal", "tau1", "tau2", "tau3", "tau4", "h1", "h2", "h3", "h4"}) {
        FreeInvolution s;
        try {
          s = catalog_involution(n, name);
        } catch (const InvolutionError&) {
          continue;
        }
        CHECK(validate_free_involution(s.map) == InvolutionVerdict::ok);
        CHECK((determinant(s.linear()) > 0) == (s.orientation == Orientation::preserves));
      }
  }
  SUBCASE("h-family agrees with the catalog") {
    CHECK(h_family_involution(0, 0).map == catalog_involution(3, "h1").map);
    CHECK(h_family_involution(1, 0).map == catalog_involution(3, "h3").map);
    CHECK(h_family_involution(1, 1).map == catalog_involution(3, "h4").map);
  }
  SUBCASE("dimension mismatches are refused") {
    CHECK_THROWS_AS(catalog_involution(2, "h2"), InvolutionError);
    CHECK_THROWS_AS(catalog_involution(3, "antipodal"), InvolutionError);
    CHECK_THROWS_AS(catalog_involution(2, "nonsense"), InvolutionError);
  }
}

TEST_CASE("free involution validation") {
  CHECK(validate_free_involution(affine(IntMatrix{{-1}}, {0})) == InvolutionVerdict::not_free);
  CHECK(validate_free_involution(affine(IntMatrix{{1}}, {Rational(1, 3)})) == InvolutionVerdict::not_involution);
  CHECK(validate_free_involution(affine(IntMatrix{{-1, 0}, {0, -1}}, {half, 0})) == InvolutionVerdict::not_free);
  CHECK_THROWS_AS(custom_involution(affine(IntMatrix{{-1}}, {0})), InvolutionError);
  const auto ok = custom_involution(affine(IntMatrix{{1, 0}, {0, -1}}, {half, 0}));
  CHECK(ok.tag == InvolutionTag::custom);
  CHECK(ok.orientation == Orientation::reverses);
}

TEST_CASE("matrix parsing") {
  CHECK(parse_matrix("1,0;0,2", 2) == IntMatrix{{1, 0}, {0, 2}});
  CHECK(parse_matrix("[[1,0],[0,2]]", 0) == IntMatrix{{1, 0}, {0, 2}});
  CHECK(parse_matrix(" 1, -2 ; 3 ,4 ", 0) == IntMatrix{{1, -2}, {3, 4}});
  CHECK(parse_matrix("2", 1) == IntMatrix{{2}});
  CHECK(parse_matrix("[[\"123456789012345678901234567890\"]]", 1)(0, 0) ==
        Integer("123456789012345678901234567890"));
  CHECK_THROWS_AS(parse_matrix("1,0;0", 2), ParseError);
  CHECK_THROWS_AS(parse_matrix("1,x", 0), ParseError);
  CHECK_THROWS_AS(parse_matrix("1,0;0,1", 3), ParseError);
  CHECK_THROWS_AS(parse_matrix("[[1,0],[0,1]", 0), ParseError);
  CHECK_THROWS_AS(parse_matrix("", 0), ParseError);
}

TEST_CASE("rational vector parsing") {
  CHECK(parse_rational_vector("0,0,1/2", 3) == RationalVector{0, 0, half});
  CHECK(parse_rational_vector("[\"1/2\", 0]", 2) == RationalVector{half, 0});
  CHECK(parse_rational_vector("2/4", 1) == RationalVector{half});
  CHECK_THROWS_AS(parse_rational_vector("1/0", 1), ParseError);
  CHECK_THROWS_AS(parse_rational_vector("1,2", 3), ParseError);
}
