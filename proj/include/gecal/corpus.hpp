#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gecal/pos_tag.hpp"
#include "gecal/text.hpp"

namespace gecal {

struct Sentence {
  std::string id;
  Tokens tokens;
  // Per-token gold POS tags; empty when the sentence is untagged.
  std::vector<PosTag> tags;

  bool operator==(const Sentence&) const = default;
};

struct ReferenceEdit {
  std::size_t src_start = 0;
  std::size_t src_end = 0;  // exclusive
  Tokens replacement;
  int annotator = 0;

  bool operator==(const ReferenceEdit&) const = default;
};

struct AnnotatorEdits {
  int annotator = 0;
  std::vector<ReferenceEdit> edits;

  bool operator==(const AnnotatorEdits&) const = default;
};

struct ParallelExample {
  Sentence source;
  // Sorted by annotator id, one entry per annotator that judged the sentence.
  std::vector<AnnotatorEdits> references;
  std::optional<Sentence> corrected;

  /// Edits of `annotator`, or nullptr when that annotator is absent.
  const std::vector<ReferenceEdit>* edits_of(int annotator) const;

  bool operator==(const ParallelExample&) const = default;
};

enum class Split { kTrain, kDev, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct Corpus {
  std::string name = "corpus";
  Split split = Split::kTrain;
  std::vector<ParallelExample> examples;

  bool operator==(const Corpus&) const = default;
};

/// Applies edits to `source` right-to-left by start index. Edits must be
/// non-overlapping and within bounds.
Tokens apply_reference_edits(const Tokens& source, std::vector<ReferenceEdit> edits);

/// Fills `corrected` from annotator-0 edits (source copied when annotator 0
/// has no edits); leaves it empty when annotator 0 is absent.
void materialize_corrected(ParallelExample& example);

Corpus parse_m2(std::string_view text, std::string name = "m2", Split split = Split::kTest);

Corpus parse_parallel(std::string_view src_text, std::string_view cor_text,
                      std::string name = "parallel", Split split = Split::kTest);

enum class AnnotatorPolicy {
  kAny,    // at least one annotator has an edit
  kFixed,  // the configured annotator has an edit
};

/// Keeps examples judged incorrect. With kFixed, `annotator` selects whose
/// edits count.
Corpus filter_incorrect(const Corpus& corpus, AnnotatorPolicy policy = AnnotatorPolicy::kAny,
                        int annotator = 0);

/// Attaches gold POS tags from a parallel tag file: one line per example,
/// one whitespace-separated tag per source token. Unknown tag names fold to
/// OTHER.
void attach_tags(Corpus& corpus, std::string_view tags_text);

std::string serialize_corpus(const Corpus& corpus);
Corpus deserialize_corpus(std::string_view text);

void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

inline constexpr std::string_view kCorpusMagic = "GECAL-CORPUS";
inline constexpr std::string_view kEmptyReplacement = "\xE2\x88\x85-NONE-\xE2\x88\x85";

}  // namespace gecal
