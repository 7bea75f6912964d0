#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gecal/corpus.hpp"
#include "gecal/pos_tag.hpp"

namespace gecal::pos {

struct TagWeight {
  PosTag tag;
  std::uint64_t weight;

  bool operator==(const TagWeight&) const = default;
};

/// Unigram most-frequent-tag lexicon.
class PosLexicon {
 public:
  explicit PosLexicon(bool case_sensitive = true) : case_sensitive_(case_sensitive) {}

  /// Adds `weight` to (word, tag). Weights accumulate across calls.
  void add(std::string_view word, PosTag tag, std::uint64_t weight);

  /// Tag list sorted by descending weight, ties by tag name; empty when unknown.
  const std::vector<TagWeight>& tags_of(std::string_view word) const;

  /// Best tag, OTHER when the word is out of lexicon.
  PosTag lookup(std::string_view word) const;

  bool case_sensitive() const { return case_sensitive_; }
  std::size_t size() const { return entries_.size(); }

  /// Entries in lexicographic word order.
  std::vector<std::pair<std::string, std::vector<TagWeight>>> sorted_entries() const;

  // Lines whose tag name was outside the closed tag set.
  std::size_t unknown_tag_lines = 0;

 private:
  std::string key(std::string_view word) const;

  bool case_sensitive_;
  std::unordered_map<std::string, std::vector<TagWeight>> entries_;
};

/// Parses `word TAG count` lines (tab or space separated). Blank lines and
/// lines starting with '#' are skipped.
PosLexicon parse_lexicon(std::string_view text, bool case_sensitive = true);
PosLexicon load_lexicon(const std::string& path, bool case_sensitive = true);

struct TaggedToken {
  std::string surface;
  PosTag tag;

  bool operator==(const TaggedToken&) const = default;
};

struct TagCoverage {
  std::size_t tokens = 0;
  std::size_t out_of_lexicon = 0;
};

/// Gold tags win when the sentence carries them; otherwise lexicon lookup.
std::vector<TaggedToken> tag_sentence(const Sentence& sentence, const PosLexicon& lexicon,
                                      TagCoverage* coverage = nullptr);

struct WordCount {
  std::string word;
  std::uint64_t count;

  bool operator==(const WordCount&) const = default;
};

inline constexpr std::uint64_t kDefaultMinCount = 100;

class FrequencyTable {
 public:
  FrequencyTable() = default;

  const std::vector<WordCount>& row(PosTag tag) const {
    return rows_[static_cast<std::size_t>(tag)];
  }
  std::uint64_t min_count() const { return min_count_; }

  bool operator==(const FrequencyTable&) const = default;

 private:
  friend FrequencyTable build_frequency_table(const Corpus&, const PosLexicon&, std::uint64_t,
                                              TagCoverage*);
  friend FrequencyTable deserialize_frequency_table(std::string_view);

  std::array<std::vector<WordCount>, kPosTagCount> rows_{};
  std::uint64_t min_count_ = kDefaultMinCount;
};

/// Counts (word, tag) occurrences over all source sentences and drops rows
/// entries below `min_count`. Rows sort by count descending, then word.
FrequencyTable build_frequency_table(const Corpus& corpus, const PosLexicon& lexicon,
                                     std::uint64_t min_count = kDefaultMinCount,
                                     TagCoverage* coverage = nullptr);

std::vector<std::string> top_k_targets(const FrequencyTable& table, PosTag tag, std::size_t k);

// `GECAL-FREQ v1 <min_count>` header, then `TAG<TAB>word<TAB>count` lines.
std::string serialize_frequency_table(const FrequencyTable& table);
FrequencyTable deserialize_frequency_table(std::string_view text);

}  // namespace gecal::pos
