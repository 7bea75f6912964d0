#include "gecal/edit_metric.hpp"

#include <algorithm>
#include <cmath>

#include "gecal/dictionary.hpp"
#include "gecal/error.hpp"
#include "gecal/oracle.hpp"

namespace gecal::metric {

std::vector<AlignOp> align(std::span<const std::string> src, std::span<const std::string> hyp) {
  const std::size_t n = src.size();
  const std::size_t m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<std::size_t> d((n + 1) * width);
  for (std::size_t i = 0; i <= n; ++i) d[i * width] = i;
  for (std::size_t j = 0; j <= m; ++j) d[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = d[(i - 1) * width + j - 1] + (src[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t del = d[(i - 1) * width + j] + 1;
      const std::size_t ins = d[i * width + j - 1] + 1;
      d[i * width + j] = std::min({diag, del, ins});
    }
  }

  std::vector<AlignOp> ops;
  ops.reserve(n + m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = d[i * width + j];
    if (i > 0 && j > 0) {
      const bool same = src[i - 1] == hyp[j - 1];
      if (here == d[(i - 1) * width + j - 1] + (same ? 0 : 1)) {
        ops.push_back({same ? OpKind::kMatch : OpKind::kSub, i - 1, j - 1});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here == d[(i - 1) * width + j] + 1) {
      ops.push_back({OpKind::kDel, i - 1, std::nullopt});
      --i;
      continue;
    }
    ops.push_back({OpKind::kIns, std::nullopt, j - 1});
    --j;
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::size_t alignment_cost(std::span<const AlignOp> ops) {
  return static_cast<std::size_t>(
      std::count_if(ops.begin(), ops.end(), [](const AlignOp& op) { return op.kind != OpKind::kMatch; }));
}

std::vector<EditSpan> extract_edits(std::span<const AlignOp> ops, std::span<const std::string> src,
                                    std::span<const std::string> hyp) {
  std::vector<EditSpan> spans;
  std::size_t consumed = 0;  // source tokens consumed so far
  std::optional<EditSpan> run;
  for (const auto& op : ops) {
    if (op.kind == OpKind::kMatch) {
      if (run) {
        run->src_end = consumed;
        spans.push_back(std::move(*run));
        run.reset();
      }
      ++consumed;
      continue;
    }
    if (!run) run = EditSpan{consumed, consumed, {}};
    if (op.kind == OpKind::kSub || op.kind == OpKind::kDel) ++consumed;
    if (op.kind == OpKind::kSub || op.kind == OpKind::kIns) run->hyp_tokens.push_back(hyp[*op.hyp_index]);
  }
  if (run) {
    run->src_end = consumed;
    spans.push_back(std::move(*run));
  }
  (void)src;
  return spans;
}

Tokens apply_spans(std::span<const std::string> src, std::span<const EditSpan> spans) {
  Tokens out(src.begin(), src.end());
  for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(it->src_start),
              out.begin() + static_cast<std::ptrdiff_t>(it->src_end));
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(it->src_start), it->hyp_tokens.begin(),
               it->hyp_tokens.end());
  }
  return out;
}

std::size_t count_edits(std::span<const std::string> src, std::span<const std::string> hyp) {
  if (std::equal(src.begin(), src.end(), hyp.begin(), hyp.end())) return 0;
  auto ops = align(src, hyp);
  return extract_edits(ops, src, hyp).size();
}

std::vector<ReferenceEdit> to_reference_edits(std::span<const EditSpan> spans, int annotator) {
  std::vector<ReferenceEdit> out;
  out.reserve(spans.size());
  for (const auto& s : spans) out.push_back({s.src_start, s.src_end, s.hyp_tokens, annotator});
  return out;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

EditScore score_against(std::span<const EditSpan> hyp, const std::vector<ReferenceEdit>& refs) {
  std::vector<bool> used(refs.size(), false);
  EditScore score;
  for (const auto& h : hyp) {
    bool hit = false;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      if (used[r]) continue;
      if (refs[r].src_start == h.src_start && refs[r].src_end == h.src_end &&
          refs[r].replacement == h.hyp_tokens) {
        used[r] = true;
        hit = true;
        break;
      }
    }
    hit ? ++score.tp : ++score.fp;
  }
  score.fn = refs.size() - score.tp;
  return score;
}

}  // namespace

double EditScore::precision() const { return ratio(tp, tp + fp); }
double EditScore::recall() const { return ratio(tp, tp + fn); }

double EditScore::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

EditScore& EditScore::operator+=(const EditScore& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

EditScore score_edits(std::span<const EditSpan> hyp_edits, std::span<const AnnotatorEdits> references,
                      MultiRefPolicy policy) {
  static const std::vector<ReferenceEdit> kNone;
  if (references.empty()) return score_against(hyp_edits, kNone);

  std::vector<const AnnotatorEdits*> sorted;
  for (const auto& r : references) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->annotator < b->annotator; });

  if (policy == MultiRefPolicy::kFirstAnnotator) {
    for (const auto* r : sorted)
      if (r->annotator == 0) return score_against(hyp_edits, r->edits);
    return score_against(hyp_edits, kNone);
  }

  EditScore best = score_against(hyp_edits, sorted.front()->edits);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    EditScore s = score_against(hyp_edits, sorted[i]->edits);
    if (s.f1() > best.f1()) best = s;
  }
  return best;
}

EditScore score_corpus(const Corpus& corpus, std::span<const Tokens> hypotheses, MultiRefPolicy policy) {
  if (hypotheses.size() != corpus.examples.size())
    throw Error("hypothesis count does not match corpus size");
  EditScore total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto& src = corpus.examples[i].source.tokens;
    auto ops = align(src, hypotheses[i]);
    auto spans = extract_edits(ops, src, hypotheses[i]);
    total += score_edits(spans, corpus.examples[i].references, policy);
  }
  return total;
}

Summary summarize(std::span<const std::size_t> counts, StdConvention convention) {
  Summary s;
  s.n = counts.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (auto c : counts) sum += static_cast<double>(c);
  const double mean = sum / static_cast<double>(s.n);
  double sq = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - mean;
    sq += d * d;
  }
  double divisor = static_cast<double>(s.n);
  if (convention == StdConvention::kSample) divisor = s.n > 1 ? static_cast<double>(s.n - 1) : 1.0;
  s.mean = mean;
  s.std = std::sqrt(sq / divisor);
  return s;
}

std::vector<std::size_t> edit_counts(const Corpus& corpus, GecOracle& oracle,
                                     const SubstitutionDictionary* dictionary) {
  std::vector<Tokens> inputs;
  inputs.reserve(corpus.examples.size());
  for (const auto& ex : corpus.examples)
    inputs.push_back(dictionary ? apply(*dictionary, ex.source.tokens) : ex.source.tokens);

  std::vector<Tokens> outputs;
  try {
    outputs = oracle.correct_batch(inputs);
  } catch (const OracleError&) {
    // Narrow the failure down to a sentence id.
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      try {
        oracle.correct(inputs[i]);
      } catch (const OracleError& e) {
        throw OracleError("oracle failed on sentence '" + corpus.examples[i].source.id + "': " + e.what(),
                          e.retriable());
      }
    }
    throw;
  }

  std::vector<std::size_t> counts(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) counts[i] = count_edits(inputs[i], outputs[i]);
  return counts;
}

Summary corpus_mean_edits(const Corpus& corpus, GecOracle& oracle, const SubstitutionDictionary* dictionary,
                          StdConvention convention) {
  auto counts = edit_counts(corpus, oracle, dictionary);
  return summarize(counts, convention);
}

}  // namespace gecal::metric
