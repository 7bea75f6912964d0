// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gecal/attack.hpp"
#include "gecal/cli.hpp"
#include "gecal/corpus.hpp"
#include "gecal/dictionary.hpp"
#include "gecal/edit_metric.hpp"
#include "gecal/eval.hpp"
#include "gecal/pos.hpp"
#include "gecal/text.hpp"
#include "test_support.hpp"

using namespace gecal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> check;
};

int cli_run(const std::vector<std::string>& args, std::string* err = nullptr) {
  std::ostringstream out, e;
  const int code = cli::run(args, out, e);
  if (err) *err = e.str();
  return code;
}

// ---------------------------------------------------------------- AC1

Outcome percent_arithmetic() {
  struct Case {
    const char* name;
    double base, attacked, printed;
    const char* expected;
  };
  // Subset means from the gender-subset table and the printed FCE column.
  const Case cases[] = {{"m2f", 2.100, 1.950, -7.2, "-7.1%"}, {"f2m", 0.564, 0.927, +64.3, "+64.4%"}};
  Outcome o;
  std::ostringstream d;
  for (const auto& c : cases) {
    const auto pct = eval::percent_change(c.base, c.attacked);
    const auto shown = eval::format_percent(pct);
    const bool ok = pct && std::fabs(*pct - c.printed) <= 0.2 && shown == c.expected;
    o.ok = o.ok && ok;
    d << c.name << " " << shown << " vs " << c.printed << "%; ";
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- AC2

Outcome metric_equivalence() {
  std::mt19937 rng(20240601);
  std::size_t cost_ok = 0, recon_ok = 0;
  const std::size_t n = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    auto a = testing::random_tokens(rng, 12, 5);
    auto b = testing::random_tokens(rng, 12, 5);
    auto ops = metric::align(a, b);
    cost_ok += metric::alignment_cost(ops) == testing::levenshtein(a, b);
    recon_ok += metric::apply_spans(a, metric::extract_edits(ops, a, b)) == b;
  }
  return {cost_ok == n && recon_ok == n,
          "cost " + std::to_string(cost_ok) + "/" + std::to_string(n) + ", reconstruction " +
              std::to_string(recon_ok) + "/" + std::to_string(n)};
}

// ---------------------------------------------------------------- AC3

Outcome learner_equivalence() {
  std::mt19937 rng(7);
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  const std::size_t configs = 60;
  std::size_t step_ok = 0, steps = 0, traj_ok = 0, accepted = 0;
  for (std::size_t trial = 0; trial < configs; ++trial) {
    MockGecRules rules;
    const std::size_t nrules = 1 + pick(rng) % 4;
    for (std::size_t r = 0; r < nrules; ++r) {
      Tokens lhs{words[pick(rng)]};
      if (pick(rng) % 3 == 0) lhs.push_back(words[pick(rng)]);
      Tokens rhs;
      for (std::size_t k = 0, m = pick(rng) % 3; k < m; ++k) rhs.push_back(words[pick(rng)]);
      rules.rules.push_back({lhs, rhs});
    }
    for (std::size_t b = 0, nb = 1 + pick(rng) % 4; b < nb; ++b) {
      auto& set = rules.blind_spots[words[pick(rng)]];
      for (std::size_t r = 0; r < nrules; ++r)
        if (pick(rng) % 2) set.insert(r);
    }
    MockOracle oracle(rules);

    std::vector<Tokens> sents;
    for (std::size_t s = 0, ns = 5 + pick(rng) % 16; s < ns; ++s) {
      Tokens t;
      for (std::size_t k = 0, len = 1 + pick(rng) % 7; k < len; ++k) t.push_back(words[pick(rng)]);
      sents.push_back(t);
    }
    auto train = testing::corpus_of(sents);

    attack::CandidateVocab vocab;
    for (std::size_t c = 0, nc = 1 + pick(rng) % 8; c < nc; ++c) vocab.add(PosTag::NN, words[pick(rng)]);
    vocab.finalize();

    attack::LearnerConfig cfg;
    for (std::size_t t = 0, nt = 1 + pick(rng) % 3; t < nt; ++t) cfg.targets.push_back({words[pick(rng)], PosTag::NN});
    cfg.epsilon = (trial % 4 == 0) ? 0.25 : 0.0;

    // Single step from an empty dictionary.
    for (const auto& target : cfg.targets) {
      ++steps;
      auto got = attack::learn_substitution(target, vocab, train, oracle, SubstitutionDictionary(), cfg);
      auto want = testing::brute_force_step(target, vocab.words(PosTag::NN), train, rules, SubstitutionDictionary(),
                                            cfg.epsilon, 0);
      bool ok = got.accepted == want.accepted && got.best == want.best;
      if (want.best) ok = ok && got.objective_before == want.before;
      if (want.accepted) ok = ok && got.objective_after == want.best_objective;
      step_ok += ok;
    }

    // Whole greedy loop against the exhaustive greedy.
    auto outcome = attack::learn_dictionary(cfg, train, oracle, vocab);
    SubstitutionDictionary expected("learned");
    bool ok = outcome.trajectory.rows.size() == cfg.targets.size() + 1;
    for (std::size_t k = 0; ok && k < cfg.targets.size(); ++k) {
      const auto& target = cfg.targets[k];
      auto want = testing::brute_force_step(target, vocab.words(PosTag::NN), train, rules, expected, cfg.epsilon, 0);
      const auto& row = outcome.trajectory.rows[k + 1];
      ok = ok && row.accepted == want.accepted.has_value() && row.substitution == want.accepted;
      if (want.accepted) {
        ok = ok && row.subset.mean && *row.subset.mean == want.best_objective;
        expected.add({target.word, *want.accepted, target.pos, want.before - want.best_objective});
        ++accepted;
      }
    }
    ok = ok && outcome.dictionary.entries().size() == expected.entries().size();
    for (std::size_t e = 0; ok && e < expected.size(); ++e) {
      ok = outcome.dictionary.entries()[e].target == expected.entries()[e].target &&
           outcome.dictionary.entries()[e].substitution == expected.entries()[e].substitution;
    }
    traj_ok += ok;
  }
  return {step_ok == steps && traj_ok == configs && configs >= 50,
          std::to_string(configs) + " configurations, steps " + std::to_string(step_ok) + "/" +
              std::to_string(steps) + ", trajectories " + std::to_string(traj_ok) + "/" + std::to_string(configs) +
              ", " + std::to_string(accepted) + " accepted entries"};
}

// ---------------------------------------------------------------- AC4

const char* kPlantedRules =
    "rule go => goes\n"
    "rule has => have\n"
    "rule a apple => an apple\n"
    "rule informations => information\n"
    "rule dont => do not\n";

struct Synthetic {
  std::string rules;
  std::string lexicon;
  std::string train_src, train_cor, test_src, test_cor;
};

// Sentences mixing filler words, one or two nouns and mock-correctable
// errors. "metamorphosis" blinds every rule; other nouns blind at most two.
Synthetic make_synthetic(unsigned seed) {
  std::mt19937 rng(seed);
  auto rules_text = std::string(kPlantedRules) + "blind metamorphosis *\n";
  const std::vector<std::string> distractors{"apple", "bird", "city", "door", "event"};
  std::uniform_int_distribution<int> rule_pick(0, 4);
  for (const auto& w : distractors) {
    rules_text += "blind " + w + " " + std::to_string(rule_pick(rng));
    if (rng() % 2) rules_text += " " + std::to_string(rule_pick(rng));
    rules_text += "\n";
  }
  const auto rules = parse_mock_rules(rules_text);

  const std::vector<std::string> nouns{"life", "life", "life", "time", "time", "money", "school", "friend"};
  const std::vector<std::string> fillers{"we", "really", "very", "to", "and", "the", "it"};
  const std::vector<Tokens> errors{{"go"}, {"has"}, {"a", "apple"}, {"informations"}, {"dont"}};

  auto sentence = [&] {
    Tokens s;
    std::uniform_int_distribution<int> len(2, 5);
    for (int i = 0, n = len(rng); i < n; ++i) s.push_back(fillers[rng() % fillers.size()]);
    s.insert(s.begin() + static_cast<long>(rng() % (s.size() + 1)), nouns[rng() % nouns.size()]);
    for (int e = 0, ne = 1 + static_cast<int>(rng() % 2); e < ne; ++e) {
      const auto& err = errors[rng() % errors.size()];
      s.insert(s.begin() + static_cast<long>(rng() % (s.size() + 1)), err.begin(), err.end());
    }
    s.push_back(".");
    return s;
  };

  Synthetic out;
  out.rules = rules_text;
  out.lexicon =
      "life NN 300\ntime NN 250\nmoney NN 200\nschool NN 150\nfriend NN 120\n"
      "apple NN 90\nbird NN 80\ncity NN 70\ndoor NN 60\nevent NN 50\nmetamorphosis NN 2\n"
      "we PRP 500\nit PRP 400\nreally RB 200\nvery RB 300\nto TO 900\nand CC 800\nthe DT 1000\n"
      "go VB 200\nhas VBZ 100\na DT 700\ninformations NNS 5\ndont VBP 5\n. . 2000\n";
  for (int i = 0; i < 160; ++i) {
    auto s = sentence();
    auto c = mock_correct(rules, s);
    const bool test = i % 4 == 3;
    (test ? out.test_src : out.train_src) += join(s) + "\n";
    (test ? out.test_cor : out.train_cor) += join(c) + "\n";
  }
  return out;
}

Outcome planted_blind_spot() {
  std::size_t recovered = 0, direction = 0;
  std::ostringstream d;
  const unsigned seeds = 10;
  for (unsigned seed = 1; seed <= seeds; ++seed) {
    testing::TempDir dir;
    const auto syn = make_synthetic(seed);
    write_file(dir.file("rules.txt"), syn.rules);
    write_file(dir.file("lex.txt"), syn.lexicon);
    write_file(dir.file("train.src"), syn.train_src);
    write_file(dir.file("train.cor"), syn.train_cor);
    write_file(dir.file("test.src"), syn.test_src);
    write_file(dir.file("test.cor"), syn.test_cor);
    const std::string oracle = "mock:" + dir.file("rules.txt");
    std::string err;
    int rc = cli_run({"ingest", "--src", dir.file("train.src"), "--cor", dir.file("train.cor"), "--name", "syn",
                      "--split", "train", "--out", dir.file("train.txt")},
                     &err);
    rc |= cli_run({"ingest", "--src", dir.file("test.src"), "--cor", dir.file("test.cor"), "--name", "syn", "--split",
                   "test", "--out", dir.file("test.txt")},
                  &err);
    rc |= cli_run({"learn", "--train", dir.file("train.txt"), "--lexicon", dir.file("lex.txt"), "--targets", "nn:2",
                   "--min-count", "5", "--oracle", oracle, "--out-dict", dir.file("dict.txt"), "--out-trajectory",
                   dir.file("traj.jsonl")},
                  &err);
    rc |= cli_run({"eval", "--corpus", dir.file("test.txt"), "--dict", dir.file("dict.txt"), "--oracle", oracle,
                   "--format", "json", "--out", dir.file("report.json")},
                  &err);
    if (rc != 0) {
      d << "seed " << seed << " failed: " << err;
      continue;
    }
    const auto dict = load_dictionary(dir.file("dict.txt"));
    const auto* sub = dict.substitution_for("life");
    recovered += sub && *sub == "metamorphosis";
    const auto report = eval::parse_report_json(read_file(dir.file("report.json")));
    const auto& u = report.rows.at(1);
    const bool down = u.baseline.mean && u.attacked.mean && *u.attacked.mean < *u.baseline.mean;
    direction += down;
    if (seed == 1 && u.baseline.mean && u.attacked.mean)
      d << "seed 1 union " << fixed(*u.baseline.mean, 3) << " -> " << fixed(*u.attacked.mean, 3) << "; ";
  }
  d << "recovered life->metamorphosis " << recovered << "/" << seeds << ", attacked below baseline " << direction
    << "/" << seeds;
  return {recovered == seeds && direction == seeds, d.str()};
}

// ---------------------------------------------------------------- AC5

Outcome frequency_pipeline() {
  testing::TempDir dir;
  // Counts scaled by 1/10 from the FCE table: that/IN 2940, that/DT 719,
  // that/WDT 382, which/WDT 890; threshold 100 becomes 10.
  struct Plant {
    const char* word;
    const char* tag;
    int incorrect;  // occurrences in sentences with an edit
    int correct;    // occurrences in sentences without one (filtered out)
  };
  const Plant plants[] = {{"that", "IN", 294, 40}, {"that", "DT", 72, 30}, {"that", "WDT", 38, 20},
                          {"which", "WDT", 89, 5},  {"whose", "WDT", 9, 30}, {"the", "DT", 130, 0}};
  std::string m2, tags;
  std::size_t s = 0;
  for (const auto& p : plants) {
    for (int i = 0; i < p.incorrect + p.correct; ++i, ++s) {
      const bool wrong = i < p.incorrect;
      m2 += std::string("S ") + p.word + " go .\n";
      m2 += wrong ? "A 1 2|||R:VERB|||goes|||REQUIRED|||-NONE-|||0\n\n"
                  : "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n";
      tags += std::string(p.tag) + " VB .\n";
    }
  }
  write_file(dir.file("fixture.m2"), m2);
  write_file(dir.file("fixture.tags"), tags);
  std::string err;
  int rc = cli_run({"ingest", "--m2", dir.file("fixture.m2"), "--tags", dir.file("fixture.tags"), "--out",
                    dir.file("corpus.txt")},
                   &err);
  rc |= cli_run({"freq", "--corpus", dir.file("corpus.txt"), "--min-count", "10", "--out", dir.file("freq.txt")}, &err);
  if (rc != 0) return {false, "pipeline failed: " + err};
  const auto table = pos::deserialize_frequency_table(read_file(dir.file("freq.txt")));

  auto count_of = [&](PosTag tag, const std::string& w) -> long {
    for (const auto& wc : table.row(tag))
      if (wc.word == w) return static_cast<long>(wc.count);
    return -1;
  };
  const long in = count_of(PosTag::IN, "that"), dt = count_of(PosTag::DT, "that"),
             wdt = count_of(PosTag::WDT, "that");
  const bool counts = in == 294 && dt == 72 && wdt == 38 && count_of(PosTag::WDT, "which") == 89;
  const bool dropped = count_of(PosTag::WDT, "whose") == -1;
  const bool order = pos::top_k_targets(table, PosTag::WDT, 2) == std::vector<std::string>{"which", "that"} &&
                     pos::top_k_targets(table, PosTag::DT, 2) == std::vector<std::string>{"the", "that"};
  std::ostringstream d;
  d << "that IN=" << in << " DT=" << dt << " WDT=" << wdt << ", whose(9<10) "
    << (dropped ? "dropped" : "kept") << ", row order " << (order ? "ok" : "wrong");
  return {counts && dropped && order, d.str()};
}

// ---------------------------------------------------------------- AC6

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).string();
    if (rel.find(".timing.json") != std::string::npos) continue;
    files[rel] = read_file(e.path().string());
  }
  return files;
}

Outcome determinism() {
  testing::TempDir dir;
  const auto syn = make_synthetic(42);
  const fs::path in = dir.path() / "in";
  fs::create_directories(in);
  write_file((in / "rules.txt").string(), syn.rules);
  write_file((in / "lex.txt").string(), syn.lexicon);
  write_file((in / "train.src").string(), syn.train_src);
  write_file((in / "train.cor").string(), syn.train_cor);
  const fs::path out = dir.path() / "out";
  const auto o = [&](const char* name) { return (out / name).string(); };
  const auto i = [&](const char* name) { return (in / name).string(); };

  auto pipeline = [&]() -> int {
    fs::remove_all(out);
    fs::create_directories(out);
    const std::string oracle = "mock:" + i("rules.txt");
    int rc = cli_run({"ingest", "--src", i("train.src"), "--cor", i("train.cor"), "--out", o("train.txt")});
    rc |= cli_run({"freq", "--corpus", o("train.txt"), "--lexicon", i("lex.txt"), "--min-count", "5", "--out",
                   o("freq.txt")});
    rc |= cli_run({"learn", "--train", o("train.txt"), "--lexicon", i("lex.txt"), "--freq", o("freq.txt"),
                   "--targets", "nn:3", "--oracle", oracle, "--cache", o("cache"), "--out-dict", o("dict.txt"),
                   "--out-trajectory", o("traj.jsonl"), "--out-table", o("traj.md")});
    for (const char* fmt : {"markdown", "csv", "json"})
      rc |= cli_run({"eval", "--corpus", o("train.txt"), "--dict", o("dict.txt"), "--oracle", oracle, "--cache",
                     o("cache"), "--format", fmt, "--out", o((std::string("report.") + fmt).c_str())});
    return rc;
  };
  std::vector<std::map<std::string, std::string>> runs;
  for (int r = 0; r < 3; ++r) {
    if (pipeline() != 0) return {false, "pipeline failed on run " + std::to_string(r + 1)};
    runs.push_back(snapshot(out));
  }
  std::size_t differing = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    for (const auto& [name, bytes] : runs[0]) differing += !runs[r].count(name) || runs[r].at(name) != bytes;
  const bool same_names = runs[1].size() == runs[0].size() && runs[2].size() == runs[0].size();
  std::size_t manifests = 0;
  for (const auto& [name, bytes] : runs[0]) manifests += name.find(".manifest.json") != std::string::npos;
  return {differing == 0 && same_names && manifests == 6,
          std::to_string(runs[0].size()) + " artifacts (" + std::to_string(manifests) + " manifests) x 3 runs, " +
              std::to_string(differing) + " differing"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "percent-change arithmetic vs printed table", 1.0, percent_arithmetic},
      {"AC2", "edit metric vs textbook DP on 1000 random pairs", 5.0, metric_equivalence},
      {"AC3", "greedy learner vs exhaustive search", 30.0, learner_equivalence},
      {"AC4", "planted blind spot end to end, 10 seeds", 60.0, planted_blind_spot},
      {"AC5", "frequency pipeline with ambiguous 'that'", 10.0, frequency_pipeline},
      {"AC6", "byte-identical repeated pipeline runs", 60.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.ok && in_time;
    failed += !pass;
    std::printf("[%s] %s %s: %s (%.2f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
  }
  return failed == 0 ? 0 : 1;
}
