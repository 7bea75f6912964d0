#include "gecal/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <set>

#include "gecal/edit_metric.hpp"
#include "gecal/error.hpp"

namespace gecal {
namespace {

std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string example_id(std::size_t index) { return "s" + std::to_string(index); }

// Overlap and bounds checks shared by the M2 and canonical readers.
void validate_edits(std::vector<ReferenceEdit> edits, std::size_t length, std::size_t line) {
  for (const auto& e : edits) {
    if (e.src_start > e.src_end || e.src_end > length)
      throw ParseError(line, "edit span exceeds sentence length");
    if (e.src_start == e.src_end && e.replacement.empty())
      throw ParseError(line, "empty edit (insertion without replacement)");
  }
  std::stable_sort(edits.begin(), edits.end(), [](const auto& a, const auto& b) {
    return std::tie(a.src_start, a.src_end) < std::tie(b.src_start, b.src_end);
  });
  for (std::size_t i = 1; i < edits.size(); ++i)
    if (edits[i].src_start < edits[i - 1].src_end)
      throw ParseError(line, "overlapping edits for annotator " +
                                 std::to_string(edits[i].annotator));
}

struct BlockBuilder {
  ParallelExample example;
  std::map<int, std::vector<ReferenceEdit>> by_annotator;
  std::map<int, std::size_t> first_line;

  void add_annotator(int annotator, std::size_t line) {
    by_annotator[annotator];
    first_line.emplace(annotator, line);
  }

  ParallelExample finish() {
    for (auto& [annotator, edits] : by_annotator) {
      validate_edits(edits, example.source.tokens.size(), first_line[annotator]);
      example.references.push_back({annotator, std::move(edits)});
    }
    materialize_corrected(example);
    return std::move(example);
  }
};

void check_unique_ids(const Corpus& corpus) {
  std::set<std::string_view> seen;
  for (const auto& ex : corpus.examples)
    if (!seen.insert(ex.source.id).second)
      throw ParseError(0, "duplicate example id '" + ex.source.id + "'");
}

}  // namespace

const std::vector<ReferenceEdit>* ParallelExample::edits_of(int annotator) const {
  for (const auto& ref : references)
    if (ref.annotator == annotator) return &ref.edits;
  return nullptr;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "test";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw Error("unknown split '" + std::string(name) + "' (expected train, dev or test)");
}

Tokens apply_reference_edits(const Tokens& source, std::vector<ReferenceEdit> edits) {
  std::stable_sort(edits.begin(), edits.end(), [](const auto& a, const auto& b) {
    return std::tie(a.src_start, a.src_end) < std::tie(b.src_start, b.src_end);
  });
  Tokens out = source;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    if (it->src_end > out.size() || it->src_start > it->src_end)
      throw Error("reference edit out of range");
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(it->src_start),
              out.begin() + static_cast<std::ptrdiff_t>(it->src_end));
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(it->src_start), it->replacement.begin(),
               it->replacement.end());
  }
  return out;
}

void materialize_corrected(ParallelExample& example) {
  const auto* edits = example.edits_of(0);
  if (!edits) {
    example.corrected.reset();
    return;
  }
  example.corrected = Sentence{example.source.id, apply_reference_edits(example.source.tokens, *edits), {}};
}

Corpus parse_m2(std::string_view text, std::string name, Split split) {
  Corpus corpus{std::move(name), split, {}};
  std::optional<BlockBuilder> block;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (block) corpus.examples.push_back(block->finish());
      block.reset();
      continue;
    }
    if (line.starts_with("S ") || line == "S") {
      if (block) corpus.examples.push_back(block->finish());
      block.emplace();
      block->example.source.id = example_id(corpus.examples.size());
      block->example.source.tokens = split_ws(line.substr(1));
      if (block->example.source.tokens.empty()) throw ParseError(lineno, "empty source sentence");
      continue;
    }
    if (!line.starts_with("A ")) throw ParseError(lineno, "expected 'S' or 'A' line");
    if (!block) throw ParseError(lineno, "'A' line outside a sentence block");

    auto fields = split_on(line.substr(2), "|||");
    if (fields.size() != 6) throw ParseError(lineno, "annotation must have 6 '|||'-separated fields");
    auto span = split_ws(fields[0]);
    if (span.size() != 2) throw ParseError(lineno, "annotation span must be '<start> <end>'");
    auto start = parse_long(span[0]);
    auto end = parse_long(span[1]);
    auto ann_field = split_ws(fields[5]);
    long annotator = -1;
    if (ann_field.size() == 1) annotator = parse_long(ann_field[0]).value_or(-1);
    if (!start || !end) throw ParseError(lineno, "non-integer span bound");
    if (annotator < 0) throw ParseError(lineno, "bad annotator id");
    const int ann = static_cast<int>(annotator);
    block->add_annotator(ann, lineno);
    if (fields[1] == "noop" || *start == -1) continue;
    if (*start < 0 || *end < *start)
      throw ParseError(lineno, "invalid span " + std::string(fields[0]));
    const auto len = block->example.source.tokens.size();
    if (static_cast<std::size_t>(*end) > len)
      throw ParseError(lineno, "edit span exceeds sentence length");
    Tokens replacement = split_ws(fields[2]);
    if (replacement.size() == 1 && replacement[0] == "-NONE-") replacement.clear();
    block->by_annotator[ann].push_back(ReferenceEdit{static_cast<std::size_t>(*start),
                                                     static_cast<std::size_t>(*end),
                                                     std::move(replacement), ann});
  }
  if (block) corpus.examples.push_back(block->finish());
  return corpus;
}

Corpus parse_parallel(std::string_view src_text, std::string_view cor_text, std::string name,
                      Split split) {
  auto src_lines = split_lines(src_text);
  auto cor_lines = split_lines(cor_text);
  if (src_lines.size() != cor_lines.size())
    throw ParseError(0, "line count mismatch: " + std::to_string(src_lines.size()) +
                            " source vs " + std::to_string(cor_lines.size()) + " corrected");
  Corpus corpus{std::move(name), split, {}};
  corpus.examples.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    ParallelExample ex;
    ex.source = Sentence{example_id(i), split_ws(src_lines[i]), {}};
    if (ex.source.tokens.empty()) throw ParseError(i + 1, "empty source sentence");
    Tokens corrected = split_ws(cor_lines[i]);
    auto ops = metric::align(ex.source.tokens, corrected);
    auto spans = metric::extract_edits(ops, ex.source.tokens, corrected);
    ex.references.push_back({0, metric::to_reference_edits(spans, 0)});
    ex.corrected = Sentence{ex.source.id, std::move(corrected), {}};
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

Corpus filter_incorrect(const Corpus& corpus, AnnotatorPolicy policy, int annotator) {
  Corpus out{corpus.name, corpus.split, {}};
  for (const auto& ex : corpus.examples) {
    bool incorrect = false;
    if (policy == AnnotatorPolicy::kAny) {
      incorrect = std::any_of(ex.references.begin(), ex.references.end(),
                              [](const AnnotatorEdits& r) { return !r.edits.empty(); });
    } else if (const auto* edits = ex.edits_of(annotator)) {
      incorrect = !edits->empty();
    }
    if (incorrect) out.examples.push_back(ex);
  }
  return out;
}

void attach_tags(Corpus& corpus, std::string_view tags_text) {
  auto lines = split_lines(tags_text);
  if (lines.size() != corpus.examples.size())
    throw ParseError(0, "tag file has " + std::to_string(lines.size()) + " lines for " +
                            std::to_string(corpus.examples.size()) + " sentences");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto names = split_ws(lines[i]);
    auto& sentence = corpus.examples[i].source;
    if (names.size() != sentence.tokens.size())
      throw ParseError(i + 1, "tag count " + std::to_string(names.size()) +
                                  " does not match token count " +
                                  std::to_string(sentence.tokens.size()));
    sentence.tags.clear();
    for (const auto& n : names) sentence.tags.push_back(pos_tag_or_other(n));
  }
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  out += kCorpusMagic;
  out += " v1 " + corpus.name + " " + std::string(to_string(corpus.split)) + "\n";
  for (const auto& ex : corpus.examples) {
    out += "# " + ex.source.id + "\n";
    out += "S " + join(ex.source.tokens) + "\n";
    if (!ex.source.tags.empty()) {
      out += "P";
      for (PosTag t : ex.source.tags) {
        out += ' ';
        out += to_string(t);
      }
      out += "\n";
    }
    for (const auto& ref : ex.references) {
      const std::string ann = std::to_string(ref.annotator);
      if (ref.edits.empty()) {
        out += "E " + ann + " -1 -1 " + std::string(kEmptyReplacement) + "\n";
        continue;
      }
      for (const auto& e : ref.edits) {
        out += "E " + ann + " " + std::to_string(e.src_start) + " " + std::to_string(e.src_end) + " ";
        out += e.replacement.empty() ? std::string(kEmptyReplacement) : join(e.replacement);
        out += "\n";
      }
    }
    out += "\n";
  }
  return out;
}

Corpus deserialize_corpus(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "missing corpus header");
  auto header = split_ws(lines[0]);
  if (header.size() != 4 || header[0] != kCorpusMagic)
    throw ParseError(1, "not a corpus file (expected '" + std::string(kCorpusMagic) +
                            " v1 <name> <split>')");
  if (header[1] != "v1") throw ParseError(1, "unsupported corpus format version '" + header[1] + "'");
  Corpus corpus;
  corpus.name = header[2];
  try {
    corpus.split = parse_split(header[3]);
  } catch (const Error& e) {
    throw ParseError(1, e.what());
  }

  std::optional<BlockBuilder> block;
  std::optional<std::string> pending_id;
  auto flush = [&]() {
    if (block) corpus.examples.push_back(block->finish());
    block.reset();
  };
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (line.empty()) {
      flush();
      pending_id.reset();
      continue;
    }
    if (line.starts_with("# ")) {
      flush();
      pending_id = std::string(line.substr(2));
      if (pending_id->empty() || has_whitespace(*pending_id))
        throw ParseError(lineno, "invalid example id");
      continue;
    }
    if (line.starts_with("S ")) {
      if (!pending_id) throw ParseError(lineno, "'S' line without preceding '# <id>'");
      if (block) throw ParseError(lineno, "duplicate 'S' line in block");
      block.emplace();
      block->example.source.id = *pending_id;
      block->example.source.tokens = split_ws(line.substr(2));
      if (block->example.source.tokens.empty()) throw ParseError(lineno, "empty source sentence");
      continue;
    }
    if (!block) throw ParseError(lineno, "line outside an example block");
    if (line.starts_with("P ")) {
      auto names = split_ws(line.substr(2));
      if (names.size() != block->example.source.tokens.size())
        throw ParseError(lineno, "tag count does not match token count");
      for (const auto& n : names) {
        auto tag = parse_pos_tag(n);
        if (!tag) throw ParseError(lineno, "unknown POS tag '" + n + "'");
        block->example.source.tags.push_back(*tag);
      }
      continue;
    }
    if (!line.starts_with("E ")) throw ParseError(lineno, "unexpected line");
    auto fields = split_ws(line.substr(2));
    if (fields.size() < 4) throw ParseError(lineno, "'E' line needs annotator, start, end, replacement");
    auto ann = parse_long(fields[0]);
    auto start = parse_long(fields[1]);
    auto end = parse_long(fields[2]);
    if (!ann || *ann < 0 || !start || !end) throw ParseError(lineno, "bad integer field");
    const int a = static_cast<int>(*ann);
    block->add_annotator(a, lineno);
    if (*start == -1 && *end == -1) continue;
    if (*start < 0 || *end < *start) throw ParseError(lineno, "invalid span");
    Tokens replacement(fields.begin() + 3, fields.end());
    if (replacement.size() == 1 && replacement[0] == kEmptyReplacement) replacement.clear();
    block->by_annotator[a].push_back(ReferenceEdit{static_cast<std::size_t>(*start),
                                                   static_cast<std::size_t>(*end),
                                                   std::move(replacement), a});
  }
  flush();
  check_unique_ids(corpus);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  write_file(path, serialize_corpus(corpus));
}

Corpus load_corpus(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return deserialize_corpus(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.reason());
  }
}

}  // namespace gecal
