#include <doctest.h>

#include <random>

#include "nbu/report.hpp"

using namespace nbu;

namespace {

RunConfig config(Mode mode, std::size_t dim, std::string matrix, std::string involution) {
  RunConfig c;
  c.mode = mode;
  c.dimension = dim;
  c.matrix = std::move(matrix);
  c.involution = std::move(involution);
  return c;
}

}  // namespace

TEST_CASE("compute reports") {
  SUBCASE("h2 first branch") {
    const Report r = run(config(Mode::compute, 3, "1,0,0;0,1,0;1,1,2", "h2"));
    CHECK(r.exit_code == 0);
    CHECK(r.body["schema"] == 1);
    CHECK(r.body["nbu"] == 4);
    CHECK(r.body["status"] == "exact");
    CHECK(r.body["branch"] == "h2.even.pq_nonzero");
    CHECK(r.body["diagnostics"]["p"] == -1);
    CHECK(r.body["diagnostics"]["q"] == 1);
    CHECK(r.body["diagnostics"]["o"] == 1);
  }
  SUBCASE("plane torus and circle") {
    CHECK(run(config(Mode::compute, 2, "1,0;0,1", "tau2")).body["nbu"] == 0);
    CHECK(run(config(Mode::compute, 1, "2", "antipodal")).body["nbu"] == 1);
  }
  SUBCASE("conjectured values carry candidates") {
    const Report r = run(config(Mode::compute, 4, "1,0,0,0;0,1,0,0;0,0,1,0;0,0,0,1", "tau2"));
    CHECK(r.body["nbu"].is_null());
    CHECK(r.body["status"] == "conjectured");
    CHECK(r.body["candidates"] == nlohmann::ordered_json::array({0, 8}));
  }
  SUBCASE("custom involution") {
    RunConfig c = config(Mode::compute, 2, "1,0;0,2", "");
    c.custom_linear = "-1,0;0,1";
    c.custom_translation = "0,1/2";
    const Report r = run(c);
    CHECK(r.exit_code == 0);
    CHECK(r.body["involution"]["id"] == "custom");
    CHECK(r.body["nbu"] == 2);
  }
}

TEST_CASE("input errors exit with 1") {
  CHECK(run(config(Mode::compute, 2, "1,0;0", "tau2")).exit_code == 1);
  CHECK(run(config(Mode::compute, 2, "1,0;0,1", "h2")).exit_code == 1);
  CHECK(run(config(Mode::compute, 2, "1,0;0,1", "")).exit_code == 1);
  CHECK(run(config(Mode::realize, 4, "1,0,0,0;0,1,0,0;0,0,1,0;0,0,0,1", "tau2")).exit_code == 1);
  RunConfig bad = config(Mode::compute, 1, "2", "");
  bad.custom_linear = "-1";
  const Report r = run(bad);
  CHECK(r.exit_code == 1);
  CHECK(r.body["error"]["kind"] == "involution");
}

TEST_CASE("verify") {
  SUBCASE("agreement on diag(1,2)") {
    const Report r = run(config(Mode::verify, 2, "1,0;0,2", "tau2"));
    CHECK(r.exit_code == 0);
    CHECK(r.body["agreement"] == true);
    CHECK(r.body["case"]["first_principles"]["pairs"] == 2);
  }
  SUBCASE("mismatch exits with 2") {
    const Report r = run(config(Mode::verify, 3, "1,1,0;0,0,0;0,0,0", "h2"));
    CHECK(r.exit_code == 2);
    CHECK(r.body["case"]["outcome"] == "disagree");
  }
  SUBCASE("conjectured region is unverified, not a mismatch") {
    const Report r = run(config(Mode::verify, 4, "1,0,0,0;0,1,0,0;0,0,1,0;0,0,0,1", "tau2"));
    CHECK(r.exit_code == 0);
    CHECK(r.body["case"]["outcome"] == "unverified");
  }
  SUBCASE("random batch on the plane torus") {
    RunConfig c = config(Mode::verify, 2, "", "");
    c.seed = 7;
    c.count = 200;
    const Report r = run(c);
    CHECK(r.exit_code == 0);
    CHECK(r.body["summary"]["cases_run"] == 400);
    CHECK(r.body["summary"]["disagreements"] == 0);
  }
  SUBCASE("h1, h3, h4 batch has empty realizer coincidence sets") {
    RunConfig c = config(Mode::verify, 3, "", "");
    c.count = 100;
    const Report r = run(c);
    for (const auto& cs : r.body["cases"]) {
      if (cs["involution"] == "t3.h2") continue;
      CHECK(cs["first_principles"]["nbu"] == 0);
      CHECK(cs["first_principles"]["points"] == 0);
    }
  }
}

TEST_CASE("realize") {
  SUBCASE("circle") {
    const Report r = run(config(Mode::realize, 1, "2", "antipodal"));
    REQUIRE(r.exit_code == 0);
    const auto& t = r.body["terms"];
    REQUIRE(t.size() == 1);
    CHECK(t[0]["target"] == 0);
    CHECK(t[0]["source"] == 0);
    CHECK(t[0]["amplitude"] == "1/3");
    CHECK(t[0]["half_frequency"] == 2);
    REQUIRE(r.body["points"].size() == 2);
    CHECK(r.body["points"][0]["exact"][0] == "0");
    CHECK(r.body["points"][1]["exact"][0] == "1/2");
  }
  SUBCASE("plane torus") {
    const Report r = run(config(Mode::realize, 2, "1,0;0,2", "tau2"));
    CHECK(r.body["points"].size() == 4);
    REQUIRE(r.body["classes"].size() == 2);
    for (const auto& c : r.body["classes"]) {
      CHECK(c["kind"] == "single");
      CHECK(c["essential"] == true);
    }
  }
  SUBCASE("g-family on T^4") {
    const Report r = run(config(Mode::realize, 4, "1,0,0,0;0,1,0,0;0,0,1,0;0,0,0,2", "tau2"));
    CHECK(r.body["points"].size() == 16);
    CHECK(r.body["nbu"] == 8);
  }
}

TEST_CASE("batch") {
  RunConfig c = config(Mode::batch, 2, "", "");
  c.count = 30;
  c.seed = 3;
  const Report r = run(c);
  CHECK(r.exit_code == 0);
  CHECK(r.body["summary"]["uncovered"].empty());
  for (const auto& b : closed_form_branches(2)) CHECK(r.body["summary"]["coverage"].contains(b));

  SUBCASE("byte-identical across runs and thread counts") {
    RunConfig c1 = c, c4 = c;
    c1.threads = 1;
    c4.threads = 4;
    CHECK(render(run(c1), Format::json) == render(run(c4), Format::json));
    CHECK(render(run(c1), Format::csv) == render(run(c1), Format::csv));
  }
  SUBCASE("seed changes the matrices") {
    RunConfig other = c;
    other.seed = 4;
    CHECK(render(run(other), Format::json) != render(r, Format::json));
  }
}

TEST_CASE("random matrices are reproducible") {
  const auto a = random_matrices(3, 5, 42, -3, 3);
  const auto b = random_matrices(3, 5, 42, -3, 3);
  CHECK(a == b);
  for (const auto& m : a)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK((m(i, j) >= -3 && m(i, j) <= 3));
  // First draw of mt19937_64 with seed 42, reduced into [-3, 3] by modulo 7.
  std::mt19937_64 rng(42);
  CHECK(a[0](0, 0) == -3 + static_cast<long>(rng() % 7));
}

TEST_CASE("renderings") {
  const Report r = run(config(Mode::compute, 3, "1,0,0;0,1,0;1,1,2", "h2"));
  CHECK(render(r, Format::csv) ==
        "dimension,matrix,involution,nbu,status,branch,p,q,o\n3,\"1,0,0;0,1,0;1,1,2\",t3.h2,4,exact,"
        "h2.even.pq_nonzero,-1,1,1\n");
  const std::string text = render(r, Format::text);
  CHECK(text.find("nbu: 4") != std::string::npos);
  CHECK(render(r, Format::json).find("\"schema\": 1") != std::string::npos);
  CHECK(parse_format("csv") == Format::csv);
  CHECK_THROWS_AS(parse_format("xml"), ParseError);
  CHECK(parse_mode("batch") == Mode::batch);
}
