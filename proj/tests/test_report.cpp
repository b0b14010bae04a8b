#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "substrum/corpus.hpp"
#include "substrum/error.hpp"
#include "substrum/report.hpp"

using namespace substrum;

TEST_CASE("report json round trip on the corpus") {
  for (const auto& entry : corpus()) {
    CAPTURE(entry.name);
    const auto r = analyze(parse_substitution(entry.dsl));
    const auto j = to_json(r);
    const auto back = report_from_json(Json::parse(j.dump()));
    CHECK(back == r);
    CHECK(to_json(back).dump(2) == j.dump(2));
    CHECK(r.verdict.verdict == entry.expected_verdict);
  }
}

TEST_CASE("report contents for ex61") {
  const auto r = analyze(test::load("ex61"));
  REQUIRE(r.q);
  CHECK(*r.q == 3);
  CHECK(r.matrix.size() == 4);
  CHECK(r.hash.size() == 16);
  REQUIRE(r.classes);
  CHECK(r.classes->k == 2);
  CHECK(r.classes->classes[0].size() == 4);
  REQUIRE(r.extreme_points);
  CHECK(r.extreme_points->exact);
  CHECK(r.extreme_points->exact_points ==
        std::vector<std::vector<std::string>>{{"1", "1"}, {"1", "-1/3"}});
  CHECK(r.verdict.verdict == "Singular");
  CHECK(r.verdict.reasons == std::vector<std::string>{"NoSqrtQEigenvalue"});
  CHECK(!r.estimate);
  const auto j = to_json(r);
  CHECK(j.begin().key() == "schema_version");
  CHECK(!j.contains("estimate"));
}

TEST_CASE("report refusals keep the static fields") {
  const auto r = analyze(parse_substitution("a -> a b\nb -> a"));
  CHECK(!r.q);
  CHECK(r.verdict.reason == "PreconditionFailed");
  CHECK(r.verdict.detail == "not-constant-length");
  CHECK(!r.eigenvalues.empty());
  CHECK(!r.classes);
  CHECK(report_from_json(to_json(r)) == r);
}

TEST_CASE("report_from_json rejects bad input") {
  auto j = to_json(analyze(test::load("thue_morse")));
  auto wrong = j;
  wrong["schema_version"] = 2;
  CHECK_THROWS_AS(report_from_json(wrong), Error);
  auto missing = j;
  missing.erase("input");
  CHECK_THROWS_AS(report_from_json(missing), Error);
  auto typed = j;
  typed["q"] = "two";
  CHECK_THROWS_AS(report_from_json(typed), Error);
}

TEST_CASE("pure base rendering reparses") {
  const auto z = test::load("ex62");
  const auto base = pure_base(z);
  const auto text = render_pure_base(z, base);
  CHECK(text.rfind("# height 2\n", 0) == 0);
  CHECK(parse_substitution(text) == base.eta);
}

TEST_CASE("corpus reports match the committed goldens") {
  for (const auto& entry : corpus()) {
    CAPTURE(entry.name);
    std::ifstream in(std::string(SUBSTRUM_GOLDEN_DIR) + "/" + entry.name + ".json");
    REQUIRE(in);
    std::ostringstream golden;
    golden << in.rdbuf();
    const auto r = analyze(parse_substitution(entry.dsl));
    CHECK(to_json(r).dump(2) + "\n" == golden.str());
    CHECK(report_from_json(Json::parse(golden.str())) == r);
  }
}
