#include <cmath>
#include <random>

#include "doctest.h"
#include "gecal/edit_metric.hpp"
#include "test_support.hpp"

using namespace gecal;
using namespace gecal::metric;

namespace {

std::size_t count(const Tokens& a, const Tokens& b) { return count_edits(a, b); }

}  // namespace

TEST_CASE("align: identical, substitution, insertion, deletion") {
  Tokens a{"I", "has", "a", "dog"};
  auto ops = align(a, a);
  CHECK(alignment_cost(ops) == 0);
  CHECK(std::all_of(ops.begin(), ops.end(), [](const AlignOp& o) { return o.kind == OpKind::kMatch; }));

  ops = align(a, Tokens{"I", "have", "a", "dog"});
  REQUIRE(ops.size() == 4);
  CHECK(ops[1] == AlignOp{OpKind::kSub, 1, 1});

  ops = align(Tokens{"a", "b"}, Tokens{"a", "x", "b"});
  CHECK(alignment_cost(ops) == 1);
  CHECK(ops[1].kind == OpKind::kIns);
  CHECK_FALSE(ops[1].src_index);

  ops = align(Tokens{"a", "x", "b"}, Tokens{"a", "b"});
  CHECK(ops[1].kind == OpKind::kDel);
  CHECK_FALSE(ops[1].hyp_index);

  CHECK(alignment_cost(align(Tokens{}, Tokens{"a", "b"})) == 2);
  CHECK(align(Tokens{}, Tokens{}).empty());
}

TEST_CASE("extract_edits: separate and merged spans") {
  Tokens src{"He", "go", "to", "school", "and", "play"};
  Tokens hyp{"He", "goes", "to", "school", "and", "plays"};
  auto spans = extract_edits(align(src, hyp), src, hyp);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == EditSpan{1, 2, {"goes"}});
  CHECK(spans[1] == EditSpan{5, 6, {"plays"}});

  Tokens s2{"She", "has", "a", "apple"};
  Tokens h2{"She", "have", "an", "apple"};
  spans = extract_edits(align(s2, h2), s2, h2);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == EditSpan{1, 3, {"have", "an"}});
}

TEST_CASE("count_edits examples") {
  CHECK(count({"I", "like"}, {"I", "like", "it"}) == 1);
  CHECK(count({"a", "b", "c", "d"}, {"w", "x", "y", "z"}) == 1);
  CHECK(count({"a", "b", "c"}, {"a", "b", "c"}) == 0);
  CHECK(count({"a", "b", "c"}, {"x", "b", "y"}) == 2);
  CHECK(count({}, {}) == 0);
  CHECK(count({}, {"x"}) == 1);
  CHECK(count({"x"}, {}) == 1);
}

TEST_CASE("score_edits: exact match precision and recall") {
  Tokens src{"I", "has", "a", "apple", "yesterday"};
  Tokens hyp{"I", "have", "a", "apple", "today"};
  auto hyp_spans = extract_edits(align(src, hyp), src, hyp);
  AnnotatorEdits ref{0, {{1, 2, {"have"}, 0}}};
  auto s = score_edits(hyp_spans, std::span<const AnnotatorEdits>(&ref, 1));
  CHECK(s.tp == 1);
  CHECK(s.fp == 1);
  CHECK(s.fn == 0);
  CHECK(s.precision() == doctest::Approx(0.5));
  CHECK(s.recall() == doctest::Approx(1.0));
  CHECK(s.f1() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("score_edits: best annotator vs first annotator") {
  Tokens src{"a", "b", "c"};
  Tokens hyp{"a", "x", "c"};
  auto spans = extract_edits(align(src, hyp), src, hyp);
  std::vector<AnnotatorEdits> refs{{0, {{2, 3, {"y"}, 0}}}, {1, {{1, 2, {"x"}, 1}}}};
  auto best = score_edits(spans, refs);
  CHECK(best.tp == 1);
  CHECK(best.fn == 0);
  auto first = score_edits(spans, refs, MultiRefPolicy::kFirstAnnotator);
  CHECK(first.tp == 0);
  CHECK(first.fp == 1);
  CHECK(first.fn == 1);
  EditScore empty;
  CHECK(empty.precision() == 0.0);
  CHECK(empty.f1() == 0.0);
}

TEST_CASE("summarize: population and sample conventions") {
  std::vector<std::size_t> v{2, 0};
  auto p = summarize(v);
  CHECK(p.n == 2);
  CHECK(*p.mean == doctest::Approx(1.0));
  CHECK(*p.std == doctest::Approx(1.0));
  auto s = summarize(v, StdConvention::kSample);
  CHECK(*s.std == doctest::Approx(std::sqrt(2.0)));
  auto e = summarize(std::vector<std::size_t>{});
  CHECK(e.n == 0);
  CHECK_FALSE(e.mean);
  auto one = summarize(std::vector<std::size_t>{3}, StdConvention::kSample);
  CHECK(*one.mean == 3.0);
}

TEST_CASE("random pairs: cost, reconstruction, edit bound") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 2000; ++i) {
    auto a = testing::random_tokens(rng, 12, 5);
    auto b = testing::random_tokens(rng, 12, 5);
    auto ops = align(a, b);
    REQUIRE(alignment_cost(ops) == testing::levenshtein(a, b));
    auto spans = extract_edits(ops, a, b);
    REQUIRE(apply_spans(a, spans) == b);
    CHECK(count_edits(a, b) == spans.size());
    CHECK(count_edits(a, b) == testing::naive_edit_count(a, b));
    CHECK(spans.size() <= (a.size() + b.size() + 1) / 2 + 1);
    CHECK((spans.empty() == (a == b)));
    auto refs = to_reference_edits(spans);
    CHECK(apply_reference_edits(a, refs) == b);
  }
}
