#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gecal/corpus.hpp"
#include "gecal/pos_tag.hpp"

namespace gecal {

struct DictEntry {
  std::string target;
  std::string substitution;
  PosTag pos = PosTag::OTHER;
  // Drop in affected-subset mean edits when the entry was accepted.
  double accepted_gain = 0.0;

  bool operator==(const DictEntry&) const = default;
};

/// Ordered target -> substitution mapping. Identity entries are never stored.
class SubstitutionDictionary {
 public:
  explicit SubstitutionDictionary(std::string name = "dict") : name_(std::move(name)) {}

  /// Throws Error on a duplicate target or an identity mapping.
  void add(DictEntry entry);
  bool contains(std::string_view target) const;
  const std::string* substitution_for(std::string_view target) const;

  const std::vector<DictEntry>& entries() const { return entries_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::vector<std::string> targets() const;

  bool operator==(const SubstitutionDictionary& other) const {
    return name_ == other.name_ && entries_ == other.entries_;
  }

 private:
  std::string name_;
  std::vector<DictEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Replaces every token equal to a target by its substitution in one pass.
Tokens apply(const SubstitutionDictionary& dictionary, const Tokens& tokens);
Sentence apply(const SubstitutionDictionary& dictionary, const Sentence& sentence);

enum class GenderDirection { kM2F, kF2M };

/// The fixed gender pronoun swaps, optionally with capitalized variants.
SubstitutionDictionary gender_preset(GenderDirection direction, bool capitalized_variants = true);

/// Words whose presence marks a sentence as male- or female-referring; the
/// domain of the corresponding preset.
std::vector<std::string> gender_words(GenderDirection direction, bool capitalized_variants = true);

// `GECAL-DICT v1 <name>` then `target<TAB>substitution<TAB>POS<TAB>gain`.
std::string serialize_dictionary(const SubstitutionDictionary& dictionary);
SubstitutionDictionary deserialize_dictionary(std::string_view text);
void save_dictionary(const SubstitutionDictionary& dictionary, const std::string& path);
SubstitutionDictionary load_dictionary(const std::string& path);

}  // namespace gecal
