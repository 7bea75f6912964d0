#include "gecal/attack.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <unordered_set>

#include "gecal/error.hpp"
#include "json.hpp"

namespace gecal::attack {
namespace {

using ojson = nlohmann::ordered_json;

// Upper bound on sentences sent to the oracle per candidate chunk.
constexpr std::size_t kChunkSentences = 4096;

double mean_of(std::span<const std::size_t> counts) {
  if (counts.empty()) return 0.0;
  const double sum = std::accumulate(counts.begin(), counts.end(), 0.0);
  return sum / static_cast<double>(counts.size());
}

std::vector<std::size_t> count_all(std::span<const Tokens> inputs, GecOracle& oracle) {
  auto outputs = oracle.correct_batch(inputs);
  std::vector<std::size_t> counts(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) counts[i] = metric::count_edits(inputs[i], outputs[i]);
  return counts;
}

SubstitutionResult learn_impl(const Target& target, const CandidateVocab& vocab, const Corpus& train,
                              GecOracle& oracle, const SubstitutionDictionary& current,
                              const LearnerConfig& config, const std::vector<std::size_t>* full_counts) {
  SubstitutionResult result;
  if (current.contains(target.word)) {
    result.reason = "target already in dictionary";
    return result;
  }
  result.affected = affected_indices(train, {target.word});
  result.subset_n = result.affected.size();
  if (result.affected.empty()) {
    result.reason = "empty affected subset";
    return result;
  }

  // Attacked base sentences under `current`, plus where the target sits.
  std::vector<Tokens> base;
  std::vector<std::vector<std::size_t>> positions;
  for (auto idx : result.affected) {
    const auto& src = train.examples[idx].source.tokens;
    base.push_back(apply(current, src));
    auto& pos = positions.emplace_back();
    for (std::size_t t = 0; t < src.size(); ++t)
      if (src[t] == target.word) pos.push_back(t);
  }
  result.counts_before = count_all(base, oracle);

  // For the whole-train objective only the affected sentences move.
  double rest_sum = 0.0;
  std::size_t total_n = result.affected.size();
  if (config.scope == ObjectiveScope::kAll) {
    std::vector<std::size_t> owned;
    if (!full_counts) {
      owned = metric::edit_counts(train, oracle, &current);
      full_counts = &owned;
    }
    total_n = train.examples.size();
    rest_sum = std::accumulate(full_counts->begin(), full_counts->end(), 0.0);
    for (auto idx : result.affected) rest_sum -= static_cast<double>((*full_counts)[idx]);
  }
  auto objective = [&](std::span<const std::size_t> affected_counts) {
    if (config.scope == ObjectiveScope::kAffectedSubset) return mean_of(affected_counts);
    const double s = std::accumulate(affected_counts.begin(), affected_counts.end(), 0.0);
    return (rest_sum + s) / static_cast<double>(total_n);
  };
  result.objective_before = objective(result.counts_before);
  result.objective_after = result.objective_before;

  std::vector<std::string> candidates;
  for (const auto& w : vocab.words(target.pos)) {
    if (w == target.word) continue;
    if (config.max_candidates && candidates.size() >= config.max_candidates) break;
    candidates.push_back(w);
  }
  if (candidates.empty()) {
    result.reason = "no candidates for " + std::string(to_string(target.pos));
    return result;
  }

  const std::size_t per_chunk = std::max<std::size_t>(1, kChunkSentences / base.size());
  std::optional<double> best_objective;
  for (std::size_t lo = 0; lo < candidates.size(); lo += per_chunk) {
    const std::size_t hi = std::min(candidates.size(), lo + per_chunk);
    std::vector<Tokens> inputs;
    inputs.reserve((hi - lo) * base.size());
    for (std::size_t c = lo; c < hi; ++c) {
      for (std::size_t s = 0; s < base.size(); ++s) {
        Tokens attacked = base[s];
        for (auto p : positions[s]) attacked[p] = candidates[c];
        inputs.push_back(std::move(attacked));
      }
    }
    auto counts = count_all(inputs, oracle);
    for (std::size_t c = lo; c < hi; ++c) {
      std::span<const std::size_t> slice(counts.data() + (c - lo) * base.size(), base.size());
      const double obj = objective(slice);
      result.candidates.push_back({candidates[c], obj});
      if (!best_objective || obj < *best_objective) {
        best_objective = obj;
        result.best = candidates[c];
        result.counts_best.assign(slice.begin(), slice.end());
      }
    }
  }

  const double before = result.objective_before;
  if (*best_objective < before && *best_objective <= before - config.epsilon) {
    result.accepted = result.best;
    result.objective_after = *best_objective;
    result.reason = "accepted";
  } else {
    result.reason = "no candidate lowers the objective";
  }
  return result;
}

ojson summary_fields(const metric::Summary& s) {
  return {{"n", s.n}, {"mean", s.mean ? ojson(*s.mean) : ojson(nullptr)}, {"std", s.std ? ojson(*s.std) : ojson(nullptr)}};
}

std::optional<double> opt_double(const ojson& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

std::string cell(const metric::Summary& s) {
  if (!s.mean) return "n/a";
  return fixed(*s.mean, 3) + "_{±" + fixed(s.std.value_or(0.0), 3) + "}";
}

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  write_file(tmp, content);
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<std::size_t> affected_indices(const Corpus& corpus, const std::vector<std::string>& words) {
  std::vector<std::size_t> out;
  if (words.empty()) return out;
  const std::unordered_set<std::string> set(words.begin(), words.end());
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    const auto& toks = corpus.examples[i].source.tokens;
    if (std::any_of(toks.begin(), toks.end(), [&](const std::string& t) { return set.count(t) > 0; }))
      out.push_back(i);
  }
  return out;
}

Corpus affected_subset(const Corpus& corpus, const std::vector<std::string>& words) {
  Corpus out{corpus.name, corpus.split, {}};
  for (auto i : affected_indices(corpus, words)) out.examples.push_back(corpus.examples[i]);
  return out;
}

void CandidateVocab::add(PosTag tag, std::string word) {
  if (word.empty() || has_whitespace(word)) throw Error("candidate words must be non-empty and whitespace-free");
  rows_[static_cast<std::size_t>(tag)].push_back(std::move(word));
}

void CandidateVocab::finalize() {
  for (auto& row : rows_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
}

CandidateVocab build_candidate_vocab(const pos::PosLexicon& lexicon, const VocabOptions& options) {
  CandidateVocab vocab;
  for (const auto& [word, tags] : lexicon.sorted_entries()) {
    if (word.empty() || has_whitespace(word)) continue;
    for (const auto& tw : tags) {
      if (tw.weight >= options.min_weight) vocab.add(tw.tag, word);
      if (options.primary_tag_only) break;
    }
  }
  vocab.finalize();
  return vocab;
}

std::string serialize_vocab(const CandidateVocab& vocab) {
  std::string out = "GECAL-VOCAB v1\n";
  for (std::size_t t = 0; t < kPosTagCount; ++t)
    for (const auto& w : vocab.words(static_cast<PosTag>(t))) out += std::string(kPosTagNames[t]) + "\t" + w + "\n";
  return out;
}

CandidateVocab deserialize_vocab(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || split_ws(lines[0]) != Tokens{"GECAL-VOCAB", "v1"})
    throw ParseError(1, "not a GECAL-VOCAB v1 file");
  CandidateVocab vocab;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_on(lines[i], "\t");
    if (fields.size() != 2) throw ParseError(i + 1, "expected 'TAG<TAB>word'");
    auto tag = parse_pos_tag(fields[0]);
    if (!tag) throw ParseError(i + 1, "unknown POS tag '" + std::string(fields[0]) + "'");
    try {
      vocab.add(*tag, std::string(fields[1]));
    } catch (const Error& e) {
      throw ParseError(i + 1, e.what());
    }
  }
  vocab.finalize();
  return vocab;
}

SubstitutionResult learn_substitution(const Target& target, const CandidateVocab& vocab, const Corpus& train,
                                      GecOracle& oracle, const SubstitutionDictionary& current,
                                      const LearnerConfig& config) {
  return learn_impl(target, vocab, train, oracle, current, config, nullptr);
}

std::string serialize_trajectory(const LearnTrajectory& trajectory) {
  std::string out;
  for (const auto& r : trajectory.rows) {
    ojson j;
    j["n"] = r.n;
    j["target"] = r.target.empty() ? ojson(nullptr) : ojson(r.target);
    j["pos"] = r.target.empty() ? ojson(nullptr) : ojson(std::string(to_string(r.pos)));
    j["substitution"] = r.substitution ? ojson(*r.substitution) : ojson(nullptr);
    j["accepted"] = r.accepted;
    auto overall = summary_fields(r.overall);
    j["overall_n"] = overall["n"];
    j["overall_mean"] = overall["mean"];
    j["overall_std"] = overall["std"];
    auto subset = summary_fields(r.subset);
    j["subset_n"] = subset["n"];
    j["subset_mean"] = subset["mean"];
    j["subset_std"] = subset["std"];
    auto base = summary_fields(r.subset_baseline);
    j["subset_baseline_mean"] = base["mean"];
    j["subset_baseline_std"] = base["std"];
    out += j.dump() + "\n";
  }
  return out;
}

LearnTrajectory deserialize_trajectory(std::string_view text) {
  LearnTrajectory trajectory;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      auto j = ojson::parse(lines[i]);
      TrajectoryRow r;
      r.n = j.at("n").get<std::size_t>();
      if (!j.at("target").is_null()) r.target = j["target"].get<std::string>();
      if (j.contains("pos") && !j["pos"].is_null()) r.pos = pos_tag_or_other(j["pos"].get<std::string>());
      if (!j.at("substitution").is_null()) r.substitution = j["substitution"].get<std::string>();
      r.accepted = j.at("accepted").get<bool>();
      r.overall = {j.at("overall_n").get<std::size_t>(), opt_double(j, "overall_mean"), opt_double(j, "overall_std")};
      r.subset = {j.at("subset_n").get<std::size_t>(), opt_double(j, "subset_mean"), opt_double(j, "subset_std")};
      r.subset_baseline = {r.subset.n, opt_double(j, "subset_baseline_mean"), opt_double(j, "subset_baseline_std")};
      trajectory.rows.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(i + 1, std::string("bad trajectory row: ") + e.what());
    }
  }
  return trajectory;
}

std::string render_trajectory_markdown(const LearnTrajectory& trajectory) {
  if (trajectory.rows.empty()) return "";
  const auto& rows = trajectory.rows;
  const std::size_t k = rows.size() - 1;
  std::string out = "| N | Orig | Sub | ALL |";
  for (std::size_t i = 1; i <= k; ++i) out += " N" + std::to_string(i) + " |";
  out += "\n|---|---|---|---:|";
  for (std::size_t i = 1; i <= k; ++i) out += "---:|";
  out += "\n|  |  |  | #" + std::to_string(rows[0].overall.n) + " |";
  for (std::size_t i = 1; i <= k; ++i) out += " #" + std::to_string(rows[i].subset.n) + " |";
  out += "\n| 0 | - | - | " + cell(rows[0].overall) + " |";
  for (std::size_t i = 1; i <= k; ++i) out += " " + cell(rows[i].subset_baseline) + " |";
  out += "\n";
  for (std::size_t i = 1; i <= k; ++i) {
    const auto& r = rows[i];
    // Rejected steps keep the original word, shown as an identity mapping.
    out += "| " + std::to_string(i) + " | " + r.target + " | " + r.substitution.value_or(r.target) + " | " +
           cell(r.overall) + " |";
    for (std::size_t c = 1; c <= k; ++c) out += c == i ? " " + cell(r.subset) + " |" : "  |";
    out += "\n";
  }
  return out;
}

LearnOutcome learn_dictionary(const LearnerConfig& config, const Corpus& train, GecOracle& oracle,
                              const CandidateVocab& vocab, std::string dictionary_name,
                              const Checkpoint* checkpoint) {
  if (config.epsilon < 0.0) throw Error("epsilon must be non-negative");
  LearnOutcome outcome{SubstitutionDictionary(std::move(dictionary_name)), {}};
  auto& dict = outcome.dictionary;
  auto& rows = outcome.trajectory.rows;

  std::size_t done = 0;
  if (checkpoint && checkpoint->resume && std::filesystem::exists(checkpoint->trajectory_path) &&
      std::filesystem::exists(checkpoint->dictionary_path)) {
    outcome.trajectory = deserialize_trajectory(read_file(checkpoint->trajectory_path));
    dict = load_dictionary(checkpoint->dictionary_path);
    if (rows.empty() || rows.size() - 1 > config.targets.size())
      throw Error("checkpoint trajectory does not fit the configured targets");
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].target != config.targets[i - 1].word)
        throw Error("checkpoint row " + std::to_string(i) + " is for '" + rows[i].target + "', expected '" +
                    config.targets[i - 1].word + "'");
    done = rows.size() - 1;
  }

  auto counts = metric::edit_counts(train, oracle, &dict);
  if (rows.empty()) {
    const auto overall = metric::summarize(counts, config.std_convention);
    rows.push_back({0, "", PosTag::OTHER, std::nullopt, false, overall, overall, overall});
  }

  auto save = [&] {
    if (!checkpoint) return;
    write_atomically(checkpoint->dictionary_path, serialize_dictionary(dict));
    write_atomically(checkpoint->trajectory_path, serialize_trajectory(outcome.trajectory));
  };
  save();

  for (std::size_t k = done; k < config.targets.size(); ++k) {
    const auto& target = config.targets[k];
    auto res = learn_impl(target, vocab, train, oracle, dict, config, &counts);
    TrajectoryRow row;
    row.n = k + 1;
    row.target = target.word;
    row.pos = target.pos;
    row.subset_baseline = metric::summarize(res.counts_before, config.std_convention);
    if (res.accepted) {
      dict.add({target.word, *res.accepted, target.pos, res.objective_before - res.objective_after});
      for (std::size_t s = 0; s < res.affected.size(); ++s) counts[res.affected[s]] = res.counts_best[s];
      row.substitution = res.accepted;
      row.accepted = true;
      row.subset = metric::summarize(res.counts_best, config.std_convention);
    } else {
      row.subset = row.subset_baseline;
    }
    row.overall = metric::summarize(counts, config.std_convention);
    rows.push_back(std::move(row));
    save();
  }
  return outcome;
}

}  // namespace gecal::attack
