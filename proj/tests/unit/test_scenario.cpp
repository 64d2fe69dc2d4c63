#include <string>

#include <gtest/gtest.h>

#include "cpce/artifacts.hpp"
#include "cpce/errors.hpp"
#include "cpce/scenario.hpp"

using namespace cpce;

namespace {

const std::string kToy = R"({
  "schema_version": 1,
  "name": "toy",
  "dimension": 2,
  "marginals": [
    {"kind": "normal", "mean": 1.0, "std": 2.0},
    {"kind": "beta", "alpha": 2.0, "beta": 5.0, "lower": 0.0, "upper": 3.0}
  ],
  "correlation": [[1.0, 0.4], [0.4, 1.0]],
  "monomials": {"max_degree": 2},
  "bids": [
    {"id": "a", "zone": "X", "cost": 1.5, "terms": [{"coef": 10.0, "powers": []}, {"coef": 2.0, "powers": [[0, 1]]}]},
    {"id": "b", "zone": "Y", "cost": 1.0, "terms": [{"coef": 4.0, "powers": [[1, 2]]}]}
  ],
  "procurement": {"reserve_x": 5, "reserve_y": 5, "tie_xy": 20, "tie_yx": 20, "epsilon": 0.01},
  "validation": {"samples": 1000, "seed": 3}
}
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "toy.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, ParsesMinimalDocument) {
  const Scenario s = parse_scenario(kToy, "toy.json");
  EXPECT_EQ(s.name, "toy");
  EXPECT_EQ(s.dimension, 2u);
  EXPECT_EQ(s.marginals[1], Marginal::beta(2, 5, 0, 3));
  EXPECT_EQ(s.correlation(0, 1), 0.4);
  ASSERT_EQ(s.bids.size(), 2u);
  EXPECT_EQ(s.bids[1].zone(), Zone::Y);
  EXPECT_EQ(s.procurement.n_x, 1u);
  EXPECT_EQ(s.procurement.n_y, 1u);
  EXPECT_EQ(s.procurement.costs(0), 1.5);
  EXPECT_EQ(s.validation.samples, 1000u);
  EXPECT_EQ(s.validation.bins, 60u);
  EXPECT_FALSE(s.quadrature.k.has_value());
  EXPECT_GE(s.quadrature_order(), 3);
}

TEST(Scenario, FlatCorrelationIsAccepted) {
  const Scenario s = parse_scenario(replace(kToy, "[[1.0, 0.4], [0.4, 1.0]]", "[1.0, 0.4, 0.4, 1.0]"));
  EXPECT_EQ(s.correlation(1, 0), 0.4);
}

TEST(Scenario, RoundTripIsByteStable) {
  const Scenario s = parse_scenario(kToy);
  const std::string once = to_json(s);
  const std::string twice = to_json(parse_scenario(once));
  EXPECT_EQ(once, twice);
}

TEST(Scenario, CanonicalFilesMatchBuilders) {
  for (const auto& name : canonical_scenario_names()) {
    const std::string path = std::string(CPCE_SOURCE_DIR) + "/scenarios/" + name + ".json";
    EXPECT_EQ(read_text_file(path), to_json(canonical_scenario(name))) << name;
  }
  EXPECT_THROW(canonical_scenario("nope"), ParameterError);
}

TEST(Scenario, CanonicalShapes) {
  const Scenario n8 = canonical_scenario("normal8");
  EXPECT_EQ(n8.dimension, 8u);
  EXPECT_EQ(n8.bids.size(), 8u);
  EXPECT_EQ(n8.procurement.n_x, 4u);
  EXPECT_EQ(n8.procurement.reserve_x, 100.0);
  EXPECT_EQ(n8.procurement.tie_yx, 100.0);
  EXPECT_EQ(generate_monomials(8, n8.monomials.max_degree, n8.filter()).size(), 9u);

  const Scenario b8 = canonical_scenario("beta8");
  EXPECT_EQ(b8.quadrature_order(), 15);
  EXPECT_EQ(b8.procurement.reserve_y, 1000.0);
  EXPECT_EQ(b8.procurement.tie_xy, 500.0);
  EXPECT_EQ(generate_monomials(8, b8.monomials.max_degree, b8.filter()).size(), 21u);

  const Scenario t = canonical_scenario("toy1d");
  EXPECT_EQ(generate_monomials(1, t.monomials.max_degree, t.filter()).size(), 3u);
}

TEST(ScenarioErrors, SyntaxErrorReportsLine) {
  const std::string msg = error_of(replace(kToy, "\"name\": \"toy\",", "\"name\": \"toy\""));
  EXPECT_NE(msg.find("toy.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(ScenarioErrors, UnknownFieldNamesPathAndLine) {
  const std::string msg = error_of(replace(kToy, "\"max_degree\": 2", "\"max_degree\": 2, \"colour\": 1"));
  EXPECT_EQ(msg, "toy.json:10: monomials.colour: unknown field");
}

TEST(ScenarioErrors, BadMarginalKind) {
  const std::string msg = error_of(replace(kToy, "\"kind\": \"beta\"", "\"kind\": \"gamma\""));
  EXPECT_NE(msg.find("toy.json:7: marginals[1].kind"), std::string::npos) << msg;
}

TEST(ScenarioErrors, InvalidMarginalParameters) {
  const std::string msg = error_of(replace(kToy, "\"std\": 2.0", "\"std\": -2.0"));
  EXPECT_NE(msg.find("toy.json:6: marginals[0]"), std::string::npos) << msg;
}

TEST(ScenarioErrors, MissingField) {
  const std::string msg = error_of(replace(kToy, "\"dimension\": 2,", ""));
  EXPECT_NE(msg.find("dimension: required field is missing"), std::string::npos) << msg;
}

TEST(ScenarioErrors, CorrelationProblems) {
  EXPECT_NE(error_of(replace(kToy, "[[1.0, 0.4], [0.4, 1.0]]", "[[1.0, 0.4], [0.3, 1.0]]")).find("toy.json:9: correlation"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kToy, "[[1.0, 0.4], [0.4, 1.0]]", "[[1.0, 1.5], [1.5, 1.0]]")).find("correlation"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kToy, "[[1.0, 0.4], [0.4, 1.0]]", "[1.0, 0.4, 0.4]")).find("correlation"),
            std::string::npos);
}

TEST(ScenarioErrors, BidProblems) {
  EXPECT_NE(error_of(replace(kToy, "\"zone\": \"X\"", "\"zone\": \"Z\"")).find("toy.json:12: bids[0].zone"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kToy, "\"id\": \"b\"", "\"id\": \"a\"")).find("duplicate bid id"), std::string::npos);
  EXPECT_NE(error_of(replace(kToy, "[[1, 2]]", "[[2, 2]]")).find("bids[1]"), std::string::npos);
  const std::string swapped = replace(replace(kToy, "\"zone\": \"X\"", "\"zone\": \"Q\""), "\"zone\": \"Y\"", "\"zone\": \"X\"");
  EXPECT_NE(error_of(replace(swapped, "\"zone\": \"Q\"", "\"zone\": \"Y\"")).find("zone X bids must precede"),
            std::string::npos);
}

TEST(ScenarioErrors, ProcurementAndVersion) {
  EXPECT_NE(error_of(replace(kToy, "\"epsilon\": 0.01", "\"epsilon\": 0.7")).find("epsilon"), std::string::npos);
  EXPECT_NE(error_of(replace(kToy, "\"schema_version\": 1", "\"schema_version\": 2")).find("unsupported schema version"),
            std::string::npos);
}

TEST(ScenarioErrors, MissingFileIsValidationError) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ValidationError);
}
