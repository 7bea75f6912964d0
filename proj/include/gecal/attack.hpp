#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gecal/corpus.hpp"
#include "gecal/dictionary.hpp"
#include "gecal/edit_metric.hpp"
#include "gecal/oracle.hpp"
#include "gecal/pos.hpp"

namespace gecal::attack {

/// Examples whose source contains at least one of `words`.
Corpus affected_subset(const Corpus& corpus, const std::vector<std::string>& words);
std::vector<std::size_t> affected_indices(const Corpus& corpus,
                                          const std::vector<std::string>& words);

/// POS-matched substitution candidates, each row sorted and unique.
class CandidateVocab {
 public:
  void add(PosTag tag, std::string word);
  /// Sorts and deduplicates every row.
  void finalize();

  const std::vector<std::string>& words(PosTag tag) const {
    return rows_[static_cast<std::size_t>(tag)];
  }
  std::size_t size(PosTag tag) const { return words(tag).size(); }

 private:
  std::array<std::vector<std::string>, kPosTagCount> rows_{};
};

struct VocabOptions {
  // Minimum lexicon weight for a (word, tag) pair to qualify.
  std::uint64_t min_weight = 1;
  // Only a word's highest-weight tag qualifies it.
  bool primary_tag_only = true;
};

CandidateVocab build_candidate_vocab(const pos::PosLexicon& lexicon,
                                     const VocabOptions& options = {});

// `GECAL-VOCAB v1` then `TAG<TAB>word` lines.
std::string serialize_vocab(const CandidateVocab& vocab);
CandidateVocab deserialize_vocab(std::string_view text);

enum class ObjectiveScope { kAffectedSubset, kAll };

struct Target {
  std::string word;
  PosTag pos = PosTag::OTHER;

  bool operator==(const Target&) const = default;
};

struct LearnerConfig {
  std::vector<Target> targets;
  ObjectiveScope scope = ObjectiveScope::kAffectedSubset;
  // Required drop in the objective; acceptance is always strict.
  double epsilon = 0.0;
  // 0 means the full POS row.
  std::size_t max_candidates = 0;
  metric::StdConvention std_convention = metric::StdConvention::kPopulation;
};

struct CandidateResult {
  std::string word;
  double objective = 0.0;
};

struct SubstitutionResult {
  std::optional<std::string> accepted;  // nullopt: rejected
  std::optional<std::string> best;      // argmin candidate, even when rejected
  double objective_before = 0.0;
  double objective_after = 0.0;         // == before when rejected
  std::size_t subset_n = 0;
  std::string reason;
  std::vector<CandidateResult> candidates;
  // Per-sentence edit counts on the target's affected subset, before the step
  // and under the best candidate (empty when there is no candidate).
  std::vector<std::size_t> affected;
  std::vector<std::size_t> counts_before;
  std::vector<std::size_t> counts_best;
};

/// Greedy search for one target's substitution given the dictionary learned
/// so far. Candidates are evaluated in sorted order; the first minimum wins.
SubstitutionResult learn_substitution(const Target& target, const CandidateVocab& vocab,
                                      const Corpus& train, GecOracle& oracle,
                                      const SubstitutionDictionary& current,
                                      const LearnerConfig& config);

struct TrajectoryRow {
  std::size_t n = 0;
  std::string target;  // empty for the baseline row
  PosTag pos = PosTag::OTHER;
  std::optional<std::string> substitution;
  bool accepted = false;
  metric::Summary overall;
  // Affected subset of this row's target after / before the step.
  metric::Summary subset;
  metric::Summary subset_baseline;

  bool operator==(const TrajectoryRow&) const = default;
};

struct LearnTrajectory {
  std::vector<TrajectoryRow> rows;

  bool operator==(const LearnTrajectory&) const = default;
};

/// One JSON object per line.
std::string serialize_trajectory(const LearnTrajectory& trajectory);
LearnTrajectory deserialize_trajectory(std::string_view text);

/// Markdown table shaped like the appendix tables: N, Orig, Sub, ALL and one
/// column per target subset with its sample count.
std::string render_trajectory_markdown(const LearnTrajectory& trajectory);

struct Checkpoint {
  std::string dictionary_path;
  std::string trajectory_path;
  // Continue from existing files instead of starting over.
  bool resume = false;
};

struct LearnOutcome {
  SubstitutionDictionary dictionary;
  LearnTrajectory trajectory;
};

/// Sequential greedy loop over config.targets. When `checkpoint` is set both
/// files are rewritten after every target.
LearnOutcome learn_dictionary(const LearnerConfig& config, const Corpus& train,
                              GecOracle& oracle, const CandidateVocab& vocab,
                              std::string dictionary_name = "learned",
                              const Checkpoint* checkpoint = nullptr);

}  // namespace gecal::attack
