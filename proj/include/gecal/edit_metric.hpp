#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gecal/corpus.hpp"
#include "gecal/text.hpp"

namespace gecal {
class GecOracle;
class SubstitutionDictionary;
}  // namespace gecal

namespace gecal::metric {

enum class OpKind { kMatch, kSub, kDel, kIns };

struct AlignOp {
  OpKind kind;
  std::optional<std::size_t> src_index;
  std::optional<std::size_t> hyp_index;

  bool operator==(const AlignOp&) const = default;
};

/// Minimal-cost word alignment (match 0, sub/del/ins 1). At equal cost the
/// traceback prefers the diagonal, then deletion, then insertion.
std::vector<AlignOp> align(std::span<const std::string> src, std::span<const std::string> hyp);

/// Sum of op costs: the word-level Levenshtein distance.
std::size_t alignment_cost(std::span<const AlignOp> ops);

struct EditSpan {
  std::size_t src_start = 0;
  std::size_t src_end = 0;
  Tokens hyp_tokens;

  bool operator==(const EditSpan&) const = default;
};

/// One span per maximal run of non-match ops.
std::vector<EditSpan> extract_edits(std::span<const AlignOp> ops,
                                    std::span<const std::string> src,
                                    std::span<const std::string> hyp);

/// Applies spans right-to-left; inverse of extract_edits on its own output.
Tokens apply_spans(std::span<const std::string> src, std::span<const EditSpan> spans);

/// The fluency score: number of edit spans between source and correction.
std::size_t count_edits(std::span<const std::string> src, std::span<const std::string> hyp);

std::vector<ReferenceEdit> to_reference_edits(std::span<const EditSpan> spans, int annotator = 0);

struct EditScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  EditScore& operator+=(const EditScore& other);
};

enum class MultiRefPolicy { kBestAnnotator, kFirstAnnotator };

/// Exact-match scoring of one sentence. With several annotators the one
/// maximizing sentence F1 is chosen (ties go to the lower id).
EditScore score_edits(std::span<const EditSpan> hyp_edits,
                      std::span<const AnnotatorEdits> references,
                      MultiRefPolicy policy = MultiRefPolicy::kBestAnnotator);

/// Corpus-level scoring of hypothesis corrections, one per example.
EditScore score_corpus(const Corpus& corpus, std::span<const Tokens> hypotheses,
                       MultiRefPolicy policy = MultiRefPolicy::kBestAnnotator);

enum class StdConvention { kPopulation, kSample };

struct Summary {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> std;

  bool operator==(const Summary&) const = default;
};

Summary summarize(std::span<const std::size_t> counts,
                  StdConvention convention = StdConvention::kPopulation);

/// Per-example edit counts: optionally attack each source, query the oracle,
/// count edits from the (attacked) source to the correction.
std::vector<std::size_t> edit_counts(const Corpus& corpus, GecOracle& oracle,
                                     const SubstitutionDictionary* dictionary = nullptr);

Summary corpus_mean_edits(const Corpus& corpus, GecOracle& oracle,
                          const SubstitutionDictionary* dictionary = nullptr,
                          StdConvention convention = StdConvention::kPopulation);

}  // namespace gecal::metric
