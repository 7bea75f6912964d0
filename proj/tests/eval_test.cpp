#include "doctest.h"
#include "gecal/error.hpp"
#include "gecal/eval.hpp"
#include "test_support.hpp"

using namespace gecal;
using namespace gecal::eval;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("percent change arithmetic") {
  CHECK(*percent_change(2.100, 1.950) == doctest::Approx(-7.142857).epsilon(1e-6));
  CHECK(*percent_change(0.564, 0.927) == doctest::Approx(64.361702).epsilon(1e-6));
  CHECK(format_percent(percent_change(2.100, 1.950)) == "-7.1%");
  CHECK(format_percent(percent_change(0.564, 0.927)) == "+64.4%");
  CHECK(format_percent(percent_change(1.0, 1.0)) == "+0.0%");
  CHECK_FALSE(percent_change(0.0, 1.0));
  CHECK(format_percent(std::nullopt) == "n/a");
}

TEST_CASE("report with a planted blind spot") {
  auto rules = parse_mock_rules("rule go => goes\nrule has => have\nblind metamorphosis *\n");
  MockOracle oracle(rules);
  auto corpus = testing::corpus_of({{"my", "life", "go"}, {"life", "has"}, {"he", "go"}, {"fine"}});
  SubstitutionDictionary dict("d");
  dict.add({"life", "metamorphosis", PosTag::NN, 1.0});
  auto report = evaluate_attack(corpus, oracle, dict);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].baseline.label == kAllLabel);
  CHECK(report.rows[0].baseline.n == 4);
  CHECK(*report.rows[0].baseline.mean == doctest::Approx(0.75));
  CHECK(*report.rows[0].attacked.mean == doctest::Approx(0.25));
  CHECK(report.rows[1].baseline.label == kUnionLabel);
  CHECK(report.rows[1].baseline.n == 2);
  CHECK(*report.rows[1].attacked.mean < *report.rows[1].baseline.mean);
  CHECK(*report.rows[1].percent_change == doctest::Approx(-100.0));
  CHECK(report.rows[2].target == "life");
  CHECK(report.rows[2].substitution == "metamorphosis");
  CHECK(report.oracle == oracle.fingerprint());
}

TEST_CASE("report when no target occurs") {
  MockOracle oracle(parse_mock_rules("rule go => goes\n"));
  auto corpus = testing::corpus_of({{"go"}, {"x"}});
  SubstitutionDictionary dict("d");
  dict.add({"absent", "other", PosTag::NN, 0});
  auto report = evaluate_attack(corpus, oracle, dict);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[1].baseline.n == 0);
  CHECK_FALSE(report.rows[1].baseline.mean);
  CHECK_FALSE(report.rows[1].percent_change);
  CHECK(render_report(report, Format::kMarkdown).find("n/a") != std::string::npos);
}

TEST_CASE("subset options and extra subsets") {
  MockOracle oracle(parse_mock_rules("rule go => goes\n"));
  auto corpus = testing::corpus_of({{"he", "go"}, {"she", "go"}, {"x"}});
  auto dict = gender_preset(GenderDirection::kM2F, false);
  SubsetSpec spec;
  spec.per_target = false;
  spec.extra.push_back({"gender-f", gender_words(GenderDirection::kF2M, false)});
  auto report = evaluate_attack(corpus, oracle, dict, spec);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[1].baseline.n == 1);
  CHECK(report.rows[2].baseline.label == "gender-f");
  CHECK(report.rows[2].baseline.n == 1);
  spec.union_affected = false;
  spec.extra.clear();
  CHECK(evaluate_attack(corpus, oracle, dict, spec).rows.size() == 1);
}

TEST_CASE("renderings") {
  auto rules = parse_mock_rules("rule go => goes\nblind zap *\n");
  MockOracle oracle(rules);
  auto corpus = testing::corpus_of({{"my", "life", "go"}, {"x", "go"}});
  SubstitutionDictionary dict("d");
  dict.add({"life", "zap", PosTag::NN, 1.0});
  SubsetSpec spec;
  spec.per_target = false;
  auto report = evaluate_attack(corpus, oracle, dict, spec);

  const auto json = render_report(report, Format::kJson);
  CHECK(json.find("GECAL-REPORT v1") != std::string::npos);
  CHECK(parse_report_json(json) == report);

  const auto csv = render_report(report, Format::kCsv);
  CHECK(count_lines(csv) == 3);
  CHECK(csv.rfind("label,", 0) == 0);

  const auto md = render_report(report, Format::kMarkdown);
  CHECK(md.find("\xC2\xB1") != std::string::npos);
  CHECK(md.find("| N | Orig | Sub | Subset | # | No Attack | Sub Attack | Change (%) |") != std::string::npos);

  CHECK(parse_format("csv") == Format::kCsv);
  CHECK_THROWS_AS(parse_format("xml"), Error);
  CHECK_THROWS_AS(parse_report_json("{}"), ParseError);
}

TEST_CASE("ALL row equals the mean over every sentence") {
  auto rules = parse_mock_rules("rule a => b\nrule c => d e\nblind z 0\n");
  MockOracle oracle(rules);
  std::mt19937 rng(4);
  std::vector<Tokens> sents;
  for (int i = 0; i < 60; ++i) sents.push_back(testing::random_tokens(rng, 6, 26, 1));
  auto corpus = testing::corpus_of(sents);
  SubstitutionDictionary dict("d");
  dict.add({"y", "z", PosTag::NN, 0});
  auto report = evaluate_attack(corpus, oracle, dict);
  double base = 0, att = 0;
  for (const auto& s : sents) {
    base += static_cast<double>(testing::naive_edit_count(s, mock_correct(rules, s)));
    auto a = gecal::apply(dict, s);
    att += static_cast<double>(testing::naive_edit_count(a, mock_correct(rules, a)));
  }
  CHECK(*report.rows[0].baseline.mean == doctest::Approx(base / 60));
  CHECK(*report.rows[0].attacked.mean == doctest::Approx(att / 60));
  // Unaffected sentences do not move, so the union carries the whole shift.
  const auto& u = report.rows[1];
  const double shift = (*u.attacked.mean - *u.baseline.mean) * static_cast<double>(u.baseline.n);
  CHECK(shift == doctest::Approx(att - base));
}
