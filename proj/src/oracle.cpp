#include "gecal/oracle.hpp"

#include <charconv>

#include "gecal/digest.hpp"
#include "gecal/error.hpp"

namespace gecal {

std::vector<Tokens> GecOracle::correct_batch(std::span<const Tokens> sentences) {
  if (sentences.empty()) return {};
  queries_ += sentences.size();
  auto out = do_correct_batch(sentences);
  if (out.size() != sentences.size())
    throw ProtocolError("oracle returned " + std::to_string(out.size()) + " corrections for " +
                        std::to_string(sentences.size()) + " sentences");
  return out;
}

Tokens GecOracle::correct(const Tokens& sentence) {
  return std::move(correct_batch(std::span<const Tokens>(&sentence, 1)).front());
}

std::set<std::size_t> MockGecRules::suppressed(std::span<const std::string> sentence) const {
  std::set<std::size_t> out;
  if (blind_spots.empty()) return out;
  for (const auto& tok : sentence) {
    auto it = blind_spots.find(tok);
    if (it != blind_spots.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

Tokens mock_correct(const MockGecRules& rules, std::span<const std::string> sentence) {
  const auto off = rules.suppressed(sentence);
  Tokens out;
  out.reserve(sentence.size());
  std::size_t i = 0;
  while (i < sentence.size()) {
    bool fired = false;
    for (std::size_t r = 0; r < rules.rules.size(); ++r) {
      if (off.count(r)) continue;
      const auto& lhs = rules.rules[r].lhs;
      if (lhs.size() > sentence.size() - i) continue;
      if (!std::equal(lhs.begin(), lhs.end(), sentence.begin() + static_cast<std::ptrdiff_t>(i))) continue;
      out.insert(out.end(), rules.rules[r].rhs.begin(), rules.rules[r].rhs.end());
      i += lhs.size();
      fired = true;
      break;
    }
    if (!fired) out.push_back(sentence[i++]);
  }
  return out;
}

MockGecRules parse_mock_rules(std::string_view text) {
  MockGecRules rules;
  struct Pending {
    std::size_t line;
    Tokens fields;
  };
  std::vector<Pending> blinds;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto fields = split_ws(lines[i]);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (fields[0] == "rule") {
      auto arrow = std::find(fields.begin() + 1, fields.end(), "=>");
      if (arrow == fields.end()) throw ParseError(i + 1, "rule needs '=>'");
      RewriteRule rule{Tokens(fields.begin() + 1, arrow), Tokens(arrow + 1, fields.end())};
      if (rule.lhs.empty()) throw ParseError(i + 1, "rule lhs must be non-empty");
      rules.rules.push_back(std::move(rule));
    } else if (fields[0] == "blind") {
      if (fields.size() < 3) throw ParseError(i + 1, "blind needs a trigger and rule indices");
      blinds.push_back({i + 1, std::move(fields)});
    } else {
      throw ParseError(i + 1, "unknown directive '" + fields[0] + "'");
    }
  }
  for (const auto& b : blinds) {
    auto& set = rules.blind_spots[b.fields[1]];
    for (std::size_t f = 2; f < b.fields.size(); ++f) {
      const auto& v = b.fields[f];
      if (v == "*") {
        for (std::size_t r = 0; r < rules.rules.size(); ++r) set.insert(r);
        continue;
      }
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), idx);
      if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(b.line, "bad rule index '" + v + "'");
      if (idx >= rules.rules.size()) throw ParseError(b.line, "rule index " + v + " out of range");
      set.insert(idx);
    }
  }
  return rules;
}

MockGecRules load_mock_rules(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_mock_rules(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.reason());
  }
}

std::string serialize_mock_rules(const MockGecRules& rules) {
  std::string out;
  for (const auto& r : rules.rules) {
    out += "rule " + join(r.lhs) + " =>";
    if (!r.rhs.empty()) out += " " + join(r.rhs);
    out += "\n";
  }
  for (const auto& [trigger, set] : rules.blind_spots) {
    out += "blind " + trigger;
    for (auto idx : set) out += " " + std::to_string(idx);
    out += "\n";
  }
  return out;
}

MockOracle::MockOracle(MockGecRules rules)
    : rules_(std::move(rules)),
      fingerprint_("mock-" + sha256_hex(serialize_mock_rules(rules_)).substr(0, 16)) {}

std::vector<Tokens> MockOracle::do_correct_batch(std::span<const Tokens> sentences) {
  std::vector<Tokens> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(mock_correct(rules_, s));
  return out;
}

}  // namespace gecal
