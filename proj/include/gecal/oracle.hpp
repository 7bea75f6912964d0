#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gecal/text.hpp"

namespace gecal {

/// Black-box corrector. Implementations must be deterministic and safe to
/// call from several threads.
class GecOracle {
 public:
  virtual ~GecOracle() = default;

  /// Same order and length as `sentences`.
  std::vector<Tokens> correct_batch(std::span<const Tokens> sentences);
  Tokens correct(const Tokens& sentence);

  /// Backend identity used to key caches.
  virtual std::string fingerprint() const = 0;

  /// Sentences this oracle has been asked to correct (cache hits included).
  std::size_t queries() const { return queries_.load(); }

 protected:
  virtual std::vector<Tokens> do_correct_batch(std::span<const Tokens> sentences) = 0;

 private:
  std::atomic<std::size_t> queries_{0};
};

struct RewriteRule {
  Tokens lhs;  // non-empty
  Tokens rhs;

  bool operator==(const RewriteRule&) const = default;
};

/// Rule set for the offline mock corrector. A trigger word anywhere in a
/// sentence suppresses its listed rules for that sentence.
struct MockGecRules {
  std::vector<RewriteRule> rules;
  std::map<std::string, std::set<std::size_t>> blind_spots;

  /// Rule indices suppressed for `sentence`.
  std::set<std::size_t> suppressed(std::span<const std::string> sentence) const;
};

/// Single left-to-right pass. At each position the first unsuppressed rule
/// (in priority order) whose lhs matches fires and consumes its lhs; matched
/// output is never rescanned.
Tokens mock_correct(const MockGecRules& rules, std::span<const std::string> sentence);

/// Rules file:
///   rule <lhs tokens> => <rhs tokens>
///   blind <trigger> <rule index>... | *
/// '#' starts a comment line. Rule indices are 0-based in file order.
MockGecRules parse_mock_rules(std::string_view text);
MockGecRules load_mock_rules(const std::string& path);
std::string serialize_mock_rules(const MockGecRules& rules);

class MockOracle : public GecOracle {
 public:
  explicit MockOracle(MockGecRules rules);

  std::string fingerprint() const override { return fingerprint_; }
  const MockGecRules& rules() const { return rules_; }

 protected:
  std::vector<Tokens> do_correct_batch(std::span<const Tokens> sentences) override;

 private:
  MockGecRules rules_;
  std::string fingerprint_;
};

}  // namespace gecal
