#include "gecal/dictionary.hpp"

#include <charconv>
#include <span>

#include "gecal/error.hpp"
#include "gecal/text.hpp"

namespace gecal {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct PresetEntry {
  const char* target;
  const char* substitution;
  PosTag pos;
  bool capitalized_variant;
};

constexpr PresetEntry kM2F[] = {
    {"his", "her", PosTag::PRP_DOLLAR, false}, {"him", "her", PosTag::PRP, false},
    {"he", "she", PosTag::PRP, false},         {"Mr", "Mrs", PosTag::NNP, false},
    {"His", "Her", PosTag::PRP_DOLLAR, true},  {"Him", "Her", PosTag::PRP, true},
    {"He", "She", PosTag::PRP, true},
};

constexpr PresetEntry kF2M[] = {
    {"her", "his", PosTag::PRP_DOLLAR, false}, {"hers", "his", PosTag::PRP, false},
    {"she", "he", PosTag::PRP, false},         {"Mrs", "Mr", PosTag::NNP, false},
    {"Her", "His", PosTag::PRP_DOLLAR, true},  {"Hers", "His", PosTag::PRP, true},
    {"She", "He", PosTag::PRP, true},
};

}  // namespace

void SubstitutionDictionary::add(DictEntry entry) {
  if (entry.target.empty() || entry.substitution.empty() || has_whitespace(entry.target) ||
      has_whitespace(entry.substitution))
    throw Error("dictionary words must be non-empty and whitespace-free");
  if (entry.target == entry.substitution)
    throw Error("identity mapping '" + entry.target + "' is not a substitution");
  if (index_.count(entry.target)) throw Error("duplicate dictionary target '" + entry.target + "'");
  index_.emplace(entry.target, entries_.size());
  entries_.push_back(std::move(entry));
}

bool SubstitutionDictionary::contains(std::string_view target) const {
  return index_.count(std::string(target)) > 0;
}

const std::string* SubstitutionDictionary::substitution_for(std::string_view target) const {
  auto it = index_.find(std::string(target));
  return it == index_.end() ? nullptr : &entries_[it->second].substitution;
}

std::vector<std::string> SubstitutionDictionary::targets() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.target);
  return out;
}

Tokens apply(const SubstitutionDictionary& dictionary, const Tokens& tokens) {
  if (dictionary.empty()) return tokens;
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const std::string* sub = dictionary.substitution_for(t);
    out.push_back(sub ? *sub : t);
  }
  return out;
}

Sentence apply(const SubstitutionDictionary& dictionary, const Sentence& sentence) {
  return Sentence{sentence.id, apply(dictionary, sentence.tokens), sentence.tags};
}

SubstitutionDictionary gender_preset(GenderDirection direction, bool capitalized_variants) {
  SubstitutionDictionary dict(direction == GenderDirection::kM2F ? "m2f" : "f2m");
  for (const auto& e : direction == GenderDirection::kM2F ? std::span(kM2F) : std::span(kF2M)) {
    if (e.capitalized_variant && !capitalized_variants) continue;
    dict.add({e.target, e.substitution, e.pos, 0.0});
  }
  return dict;
}

std::vector<std::string> gender_words(GenderDirection direction, bool capitalized_variants) {
  return gender_preset(direction, capitalized_variants).targets();
}

std::string serialize_dictionary(const SubstitutionDictionary& dictionary) {
  std::string out = "GECAL-DICT v1 " + dictionary.name() + "\n";
  for (const auto& e : dictionary.entries())
    out += e.target + "\t" + e.substitution + "\t" + std::string(to_string(e.pos)) + "\t" +
           format_double(e.accepted_gain) + "\n";
  return out;
}

SubstitutionDictionary deserialize_dictionary(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "missing dictionary header");
  auto header = split_ws(lines[0]);
  if (header.size() != 3 || header[0] != "GECAL-DICT") throw ParseError(1, "not a dictionary file");
  if (header[1] != "v1") throw ParseError(1, "unsupported dictionary version '" + header[1] + "'");
  SubstitutionDictionary dict(header[2]);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_on(lines[i], "\t");
    if (fields.size() != 4) throw ParseError(i + 1, "expected 'target<TAB>substitution<TAB>POS<TAB>gain'");
    auto pos = parse_pos_tag(fields[2]);
    if (!pos) throw ParseError(i + 1, "unknown POS tag '" + std::string(fields[2]) + "'");
    double gain = 0.0;
    auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), gain);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size())
      throw ParseError(i + 1, "gain is not a number");
    try {
      dict.add({std::string(fields[0]), std::string(fields[1]), *pos, gain});
    } catch (const Error& e) {
      throw ParseError(i + 1, e.what());
    }
  }
  return dict;
}

void save_dictionary(const SubstitutionDictionary& dictionary, const std::string& path) {
  write_file(path, serialize_dictionary(dictionary));
}

SubstitutionDictionary load_dictionary(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return deserialize_dictionary(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.reason());
  }
}

}  // namespace gecal
