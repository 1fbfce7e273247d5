#include <algorithm>

#include <catch2/catch_amalgamated.hpp>

#include "dqbench/csv.hpp"
#include "dqbench/dataset_io.hpp"
#include "oracles.hpp"

using namespace dqbench;

TEST_CASE("csv reader handles quoting, escapes, and newlines") {
  auto rows = csv::read("a,b,c\n\"x,y\",\"he said \"\"hi\"\"\",\"line\nbreak\"\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0].value == "a");
  CHECK_FALSE(rows[0][0].quoted);
  CHECK(rows[1][0].value == "x,y");
  CHECK(rows[1][0].quoted);
  CHECK(rows[1][1].value == "he said \"hi\"");
  CHECK(rows[1][2].value == "line\nbreak");
}

TEST_CASE("csv reader flags malformed quoting with the line") {
  CHECK_THROWS_WITH(csv::read("a\nb\"c\n"),
                    Catch::Matchers::ContainsSubstring("line 2") &&
                        Catch::Matchers::ContainsSubstring("quote"));
  CHECK_THROWS_AS(csv::read("a\n\"unterminated\n"), ParseError);
}

TEST_CASE("quoted question marks are text, unquoted ones are missing") {
  auto ds = io::parse_csv("name,size\nalpha,?\nbeta,\"?\"\n", "q");
  REQUIRE(ds.records.size() == 2);
  CHECK(is_missing(ds.records[0][1]));
  CHECK(is_text(ds.records[1][1]));
  CHECK(as_text(ds.records[1][1]) == "?");
}

TEST_CASE("empty unquoted cells are missing") {
  auto ds = io::parse_csv("a,b\n1,\n2,3\n", "q");
  CHECK(is_missing(ds.records[0][1]));
  CHECK(as_number(ds.records[1][1]) == 3.0);
}

TEST_CASE("kind inference looks at raw tokens before the missing policy") {
  // all-numeric column with markers stays numeric; mixed tokens go categorical
  auto ds = io::parse_csv("a,b\n1,x\n?,y\n3,2\n", "q");
  CHECK(ds.attributes[0].kind == AttributeKind::numeric);
  CHECK(ds.attributes[1].kind == AttributeKind::categorical);
  CHECK(is_text(ds.records[2][1]));  // "2" stays a level, not a number
}

TEST_CASE("schema declarations force kinds and catch bad numerics") {
  std::vector<AttributeSpec> schema(1);
  schema[0].name = "size";
  schema[0].kind = AttributeKind::numeric;
  CHECK_THROWS_WITH(io::parse_csv("size\n12\nabc\n", "q", schema),
                    Catch::Matchers::ContainsSubstring("record 2") &&
                        Catch::Matchers::ContainsSubstring("'abc'"));
}

TEST_CASE("header problems are parse errors") {
  CHECK_THROWS_AS(io::parse_csv("a,,c\n1,2,3\n", "q"), ParseError);
  CHECK_THROWS_AS(io::parse_csv("a,b,a\n1,2,3\n", "q"), ParseError);
  CHECK_THROWS_AS(io::parse_csv("", "q"), ParseError);
}

TEST_CASE("ragged rows name the record and both widths") {
  CHECK_THROWS_WITH(io::parse_csv("a,b\n1,2\n3\n", "q"),
                    Catch::Matchers::ContainsSubstring("record 2") &&
                        Catch::Matchers::ContainsSubstring("1 field") &&
                        Catch::Matchers::ContainsSubstring("expected 2"));
}

TEST_CASE("unmatched schema attributes produce a warning") {
  std::vector<AttributeSpec> schema(1);
  schema[0].name = "nothere";
  schema[0].kind = AttributeKind::numeric;
  std::vector<std::string> warnings;
  io::parse_csv("a\n1\n", "q", schema, &warnings);
  REQUIRE(warnings.size() >= 1);
  CHECK_THAT(warnings[0], Catch::Matchers::ContainsSubstring("nothere"));
}

TEST_CASE("date parsing follows the declared directives strictly") {
  auto d = io::parse_date("1994-03-07", "%Y-%m-%d");
  REQUIRE(d.has_value());
  CHECK(*d == Date{1994, 3, 7});
  CHECK(io::parse_date("7/3/1994", "%d/%m/%Y") == Date{1994, 3, 7});
  CHECK(io::parse_date("94", "%y") == Date{1994, 0, 0});
  CHECK_FALSE(io::parse_date("1994-13-01", "%Y-%m-%d").has_value());
  CHECK_FALSE(io::parse_date("1994-03-07x", "%Y-%m-%d").has_value());
  CHECK_FALSE(io::parse_date("199", "%Y").has_value());
}

TEST_CASE("date columns fall back to text for nonconforming cells") {
  std::vector<AttributeSpec> schema(1);
  schema[0].name = "when";
  schema[0].kind = AttributeKind::date;
  schema[0].date_format = "%Y-%m-%d";
  std::vector<std::string> warnings;
  auto ds = io::parse_csv("when\n1994-03-07\n07/03/1994\n", "q", schema, &warnings);
  CHECK(is_date(ds.records[0][0]));
  CHECK(is_text(ds.records[1][0]));
  REQUIRE_FALSE(warnings.empty());
}

TEST_CASE("arff declarations drive kinds and nominal domains") {
  const char* text =
      "% comment\n"
      "@relation demo\n"
      "@attribute size numeric\n"
      "@attribute lang {cobol, pl1}\n"
      "@attribute 'team name' string\n"
      "@data\n"
      "12, cobol, 'the a team'\n"
      "?, pl1, \"others\"\n";
  auto ds = io::parse_arff(text, "fallback");
  CHECK(ds.name == "demo");
  REQUIRE(ds.attributes.size() == 3);
  CHECK(ds.attributes[0].kind == AttributeKind::numeric);
  CHECK(ds.attributes[1].kind == AttributeKind::categorical);
  CHECK(ds.attributes[2].kind == AttributeKind::text);
  CHECK(ds.attributes[2].name == "team name");
  CHECK(is_missing(ds.records[1][0]));
  CHECK(as_text(ds.records[0][2]) == "the a team");
}

TEST_CASE("arff rejects values outside a nominal domain") {
  const char* text =
      "@relation r\n@attribute lang {a, b}\n@data\nc\n";
  CHECK_THROWS_WITH(io::parse_arff(text, "r"),
                    Catch::Matchers::ContainsSubstring("declared domain"));
}

TEST_CASE("arff java date patterns convert to directives") {
  const char* text =
      "@relation r\n@attribute d date \"yyyy-MM-dd\"\n@data\n2001-02-03\n";
  auto ds = io::parse_arff(text, "r");
  CHECK(ds.attributes[0].date_format == "%Y-%m-%d");
  CHECK(is_date(ds.records[0][0]));
  CHECK(as_date(ds.records[0][0]) == Date{2001, 2, 3});
}

TEST_CASE("arff sparse blocks are rejected") {
  const char* text = "@relation r\n@attribute a numeric\n@data\n{0 5}\n";
  CHECK_THROWS_AS(io::parse_arff(text, "r"), ParseError);
}

TEST_CASE("serialize then parse is the identity on canonical datasets") {
  std::vector<AttributeSpec> schema(3);
  schema[0].name = "size";
  schema[0].kind = AttributeKind::numeric;
  schema[1].name = "note";
  schema[1].kind = AttributeKind::text;
  schema[2].name = "when";
  schema[2].kind = AttributeKind::date;
  schema[2].date_format = "%Y-%m-%d";
  auto ds = io::parse_csv(
      "size,note,when\n"
      "1.5,plain,1994-03-07\n"
      "?,\"?\",2001-12-31\n"
      "3,\"has,comma\",1999-01-01\n",
      "q", schema);
  std::string text = io::serialize_csv(ds);
  auto again = io::parse_csv(text, "q", schema);
  REQUIRE(again.records.size() == ds.records.size());
  for (std::size_t r = 0; r < ds.records.size(); ++r)
    for (std::size_t a = 0; a < ds.attributes.size(); ++a)
      CHECK(cell_token(again.records[r][a]) == cell_token(ds.records[r][a]));
  CHECK(io::serialize_csv(again) == text);
}

TEST_CASE("missing policy replaces matching tokens and is idempotent") {
  auto ds = io::parse_csv("exp\n-1\n3\n-1\n", "q");
  io::MissingPolicy policy;
  policy.rules.emplace_back("exp", std::vector<std::string>{"-1"});
  auto once = io::apply_missing_policy(ds, policy);
  CHECK(once.replaced[0].second == 2);
  CHECK(is_missing(once.dataset.records[0][0]));
  CHECK(as_number(once.dataset.records[1][0]) == 3.0);
  auto twice = io::apply_missing_policy(once.dataset, policy);
  CHECK(twice.replaced[0].second == 0);

  io::MissingPolicy bad;
  bad.rules.emplace_back("nope", std::vector<std::string>{"-1"});
  CHECK_THROWS_AS(io::apply_missing_policy(ds, bad), ConfigError);
}

TEST_CASE("filter_records keeps or drops by predicate") {
  auto ds = io::parse_csv("id,effort\n1,10\n2,20\n3,30\n", "q");
  auto kept = io::filter_records(ds, "effort > 15", true);
  CHECK(kept.kept == 2);
  CHECK(kept.dropped == 1);
  auto dropped = io::filter_records(ds, "id = 2", false);
  CHECK(dropped.dataset.records.size() == 2);
  CHECK_THROWS_AS(io::filter_records(ds, "ghost > 1", true), ValidationError);
}

TEST_CASE("attribute summaries match two-pass statistics") {
  oracles::DatasetGen gen(7);
  for (int round = 0; round < 50; ++round) {
    std::size_t n = 2 + gen.index(40);
    std::string text = "v\n";
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
      double v = std::floor(gen.uniform(-50.0, 50.0) * 4.0) / 4.0;
      values.push_back(v);
      text += format_number(v) + "\n";
    }
    auto ds = io::parse_csv(text, "q");
    auto summary = io::summarize_attributes(ds).at(0);
    auto [mean, sd] = oracles::mean_sd(values);
    REQUIRE(summary.mean.has_value());
    CHECK_THAT(*summary.mean, Catch::Matchers::WithinAbs(mean, 1e-9));
    REQUIRE(summary.sd.has_value());
    CHECK_THAT(*summary.sd, Catch::Matchers::WithinAbs(sd, 1e-9));
    CHECK(summary.min == *std::min_element(values.begin(), values.end()));
    CHECK(summary.max == *std::max_element(values.begin(), values.end()));
  }
}
