#include "gecal/pos.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

#include "gecal/error.hpp"

namespace gecal::pos {
namespace {

void sort_tags(std::vector<TagWeight>& tags) {
  std::sort(tags.begin(), tags.end(), [](const TagWeight& a, const TagWeight& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return to_string(a.tag) < to_string(b.tag);
  });
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string PosLexicon::key(std::string_view word) const {
  std::string k(word);
  if (!case_sensitive_)
    for (auto& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return k;
}

void PosLexicon::add(std::string_view word, PosTag tag, std::uint64_t weight) {
  if (weight == 0) throw Error("lexicon weight must be positive");
  auto& tags = entries_[key(word)];
  auto it = std::find_if(tags.begin(), tags.end(), [&](const TagWeight& t) { return t.tag == tag; });
  if (it == tags.end())
    tags.push_back({tag, weight});
  else
    it->weight += weight;
  sort_tags(tags);
}

const std::vector<TagWeight>& PosLexicon::tags_of(std::string_view word) const {
  static const std::vector<TagWeight> kEmpty;
  auto it = entries_.find(key(word));
  return it == entries_.end() ? kEmpty : it->second;
}

PosTag PosLexicon::lookup(std::string_view word) const {
  const auto& tags = tags_of(word);
  return tags.empty() ? PosTag::OTHER : tags.front().tag;
}

std::vector<std::pair<std::string, std::vector<TagWeight>>> PosLexicon::sorted_entries() const {
  std::vector<std::pair<std::string, std::vector<TagWeight>>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

PosLexicon parse_lexicon(std::string_view text, bool case_sensitive) {
  PosLexicon lexicon(case_sensitive);
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto fields = split_ws(lines[i]);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (fields.size() != 3) throw ParseError(i + 1, "expected 'word TAG count'");
    auto weight = parse_u64(fields[2]);
    if (!weight) throw ParseError(i + 1, "count is not a non-negative integer");
    if (*weight == 0) throw ParseError(i + 1, "non-positive weight");
    auto tag = parse_pos_tag(fields[1]);
    if (!tag) ++lexicon.unknown_tag_lines;
    lexicon.add(fields[0], tag.value_or(PosTag::OTHER), *weight);
  }
  return lexicon;
}

PosLexicon load_lexicon(const std::string& path, bool case_sensitive) {
  const std::string text = read_file(path);
  try {
    return parse_lexicon(text, case_sensitive);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.reason());
  }
}

std::vector<TaggedToken> tag_sentence(const Sentence& sentence, const PosLexicon& lexicon,
                                      TagCoverage* coverage) {
  std::vector<TaggedToken> out;
  out.reserve(sentence.tokens.size());
  const bool gold = sentence.tags.size() == sentence.tokens.size() && !sentence.tags.empty();
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    PosTag tag;
    if (gold) {
      tag = sentence.tags[i];
    } else {
      const auto& tags = lexicon.tags_of(sentence.tokens[i]);
      tag = tags.empty() ? PosTag::OTHER : tags.front().tag;
      if (coverage && tags.empty()) ++coverage->out_of_lexicon;
    }
    out.push_back({sentence.tokens[i], tag});
  }
  if (coverage) coverage->tokens += sentence.tokens.size();
  return out;
}

FrequencyTable build_frequency_table(const Corpus& corpus, const PosLexicon& lexicon,
                                     std::uint64_t min_count, TagCoverage* coverage) {
  std::array<std::map<std::string, std::uint64_t>, kPosTagCount> counts;
  for (const auto& ex : corpus.examples)
    for (const auto& tok : tag_sentence(ex.source, lexicon, coverage))
      ++counts[static_cast<std::size_t>(tok.tag)][tok.surface];

  FrequencyTable table;
  table.min_count_ = min_count;
  for (std::size_t t = 0; t < kPosTagCount; ++t) {
    auto& row = table.rows_[t];
    for (const auto& [word, count] : counts[t])
      if (count >= min_count) row.push_back({word, count});
    std::stable_sort(row.begin(), row.end(),
                     [](const WordCount& a, const WordCount& b) { return a.count > b.count; });
  }
  return table;
}

std::vector<std::string> top_k_targets(const FrequencyTable& table, PosTag tag, std::size_t k) {
  const auto& row = table.row(tag);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, row.size()); ++i) out.push_back(row[i].word);
  return out;
}

std::string serialize_frequency_table(const FrequencyTable& table) {
  std::string out = "GECAL-FREQ v1 " + std::to_string(table.min_count()) + "\n";
  for (std::size_t t = 0; t < kPosTagCount; ++t)
    for (const auto& wc : table.row(static_cast<PosTag>(t)))
      out += std::string(kPosTagNames[t]) + "\t" + wc.word + "\t" + std::to_string(wc.count) + "\n";
  return out;
}

FrequencyTable deserialize_frequency_table(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "missing frequency table header");
  auto header = split_ws(lines[0]);
  if (header.size() != 3 || header[0] != "GECAL-FREQ") throw ParseError(1, "not a frequency table file");
  if (header[1] != "v1") throw ParseError(1, "unsupported frequency table version '" + header[1] + "'");
  auto min_count = parse_u64(header[2]);
  if (!min_count) throw ParseError(1, "bad min_count");
  FrequencyTable table;
  table.min_count_ = *min_count;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_on(lines[i], "\t");
    if (fields.size() != 3) throw ParseError(i + 1, "expected 'TAG<TAB>word<TAB>count'");
    auto tag = parse_pos_tag(fields[0]);
    auto count = parse_u64(fields[2]);
    if (!tag || !count || fields[1].empty()) throw ParseError(i + 1, "malformed entry");
    auto& row = table.rows_[static_cast<std::size_t>(*tag)];
    WordCount wc{std::string(fields[1]), *count};
    if (!row.empty()) {
      const auto& prev = row.back();
      if (prev.count < wc.count || (prev.count == wc.count && prev.word >= wc.word))
        throw ParseError(i + 1, "row not in descending count order");
    }
    row.push_back(std::move(wc));
  }
  return table;
}

}  // namespace gecal::pos
