#include "gecal/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "gecal/attack.hpp"
#include "gecal/corpus.hpp"
#include "gecal/dictionary.hpp"
#include "gecal/digest.hpp"
#include "gecal/error.hpp"
#include "gecal/eval.hpp"
#include "gecal/gec_server.hpp"
#include "gecal/http_oracle.hpp"
#include "gecal/oracle.hpp"
#include "gecal/pos.hpp"
#include "gecal/query_cache.hpp"
#include "gecal/version.hpp"
#include "json.hpp"

namespace gecal::cli {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kCacheFileName = "queries.tsv";

class UsageError : public Error {
 public:
  using Error::Error;
};

// Records every option of a subcommand so the manifest can list the fully
// resolved configuration.
class OptionRegistry {
 public:
  explicit OptionRegistry(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& name, T& value, const std::string& help) {
    getters_.emplace_back(name, [&value] { return to_text(value); });
    return app_->add_option(name, value, help);
  }

  CLI::Option* flag(const std::string& name, bool& value, const std::string& help) {
    getters_.emplace_back(name, [&value] { return std::string(value ? "true" : "false"); });
    return app_->add_flag(name, value, help);
  }

  ojson resolved() const {
    ojson out = ojson::object();
    for (const auto& [name, get] : getters_) out[name] = get();
    return out;
  }

  CLI::App* app() const { return app_; }

 private:
  static std::string to_text(const std::string& v) { return v; }
  static std::string to_text(bool v) { return v ? "true" : "false"; }
  template <typename T>
  static std::string to_text(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
      std::ostringstream ss;
      ss << v;
      return ss.str();
    } else {
      return std::to_string(v);
    }
  }

  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> getters_;
};

struct OracleArgs {
  std::string spec;
  std::string cache_dir;
  std::size_t jobs = 1;
  std::size_t batch_size = 32;
  long timeout_ms = 30000;
  int retries = 3;

  void register_on(OptionRegistry& reg) {
    if (const char* env = std::getenv("GECAL_CACHE_DIR")) cache_dir = env;
    reg.option("--oracle", spec, "GEC backend: http://host:port or mock:RULES_FILE")->required();
    reg.option("--cache", cache_dir, "Query cache directory (default $GECAL_CACHE_DIR)");
    reg.option("--jobs", jobs, "Maximum concurrent oracle requests");
    reg.option("--batch-size", batch_size, "Sentences per HTTP request");
    reg.option("--timeout-ms", timeout_ms, "HTTP timeout in milliseconds");
    reg.option("--retries", retries, "HTTP retries per batch");
  }
};

struct OracleHandle {
  std::shared_ptr<GecOracle> backend;
  std::shared_ptr<QueryCache> cache;
  std::shared_ptr<GecOracle> oracle;  // what callers query
  std::vector<std::string> input_files;
};

OracleHandle open_oracle(const OracleArgs& args) {
  OracleHandle h;
  if (args.spec.starts_with("mock:")) {
    const std::string path = args.spec.substr(5);
    h.backend = std::make_shared<MockOracle>(load_mock_rules(path));
    h.input_files.push_back(path);
  } else if (args.spec.starts_with("http://") || args.spec.starts_with("https://")) {
    HttpOptions opts;
    opts.jobs = args.jobs;
    opts.batch_size = args.batch_size;
    opts.timeout = std::chrono::milliseconds(args.timeout_ms);
    opts.retries = args.retries;
    h.backend = std::make_shared<HttpOracle>(args.spec, opts);
  } else {
    throw UsageError("--oracle must be http://host:port or mock:RULES_FILE, got '" + args.spec + "'");
  }
  h.oracle = h.backend;
  if (!args.cache_dir.empty()) {
    h.cache = std::make_shared<QueryCache>(h.backend->fingerprint(),
                                           (fs::path(args.cache_dir) / kCacheFileName).string());
    h.oracle = cached(h.backend, h.cache);
  }
  return h;
}

ojson oracle_json(const OracleHandle& h) {
  ojson j;
  j["fingerprint"] = h.backend->fingerprint();
  j["queries"] = h.oracle->queries();
  j["backend_queries"] = h.backend->queries();
  j["cache_hits"] = h.cache ? h.cache->hits() : 0;
  j["cache_misses"] = h.cache ? h.cache->misses() : 0;
  return j;
}

// Collects manifest fields during a run and writes them next to the artifact.
class Manifest {
 public:
  Manifest(std::string subcommand, const OptionRegistry& reg)
      : subcommand_(std::move(subcommand)), config_(reg.resolved()), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& path) {
    if (!path.empty()) inputs_.push_back(path);
  }
  void output(const std::string& path) { outputs_.push_back(path); }
  ojson& extra() { return extra_; }
  void oracle(const OracleHandle& h) { oracle_ = oracle_json(h); }

  void write(const std::string& path) const {
    ojson j;
    j["manifest"] = "GECAL-MANIFEST v1";
    j["subcommand"] = subcommand_;
    j["toolkit_version"] = kToolkitVersion;
    j["config"] = config_;
    j["inputs"] = digests(inputs_);
    j["outputs"] = digests(outputs_);
    j["oracle"] = oracle_;
    j["extra"] = extra_.is_null() ? ojson::object() : extra_;
    write_file(path, j.dump(2) + "\n");

    // Wall-clock time lives in a sidecar so the manifest stays reproducible.
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    ojson timing;
    timing["wall_clock_seconds"] = secs;
    timing["finished_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    write_file(path + ".timing.json", timing.dump(2) + "\n");
  }

 private:
  static ojson digests(const std::vector<std::string>& paths) {
    ojson arr = ojson::array();
    for (const auto& p : paths) arr.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    return arr;
  }

  std::string subcommand_;
  ojson config_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  ojson oracle_ = nullptr;
  ojson extra_;
  std::chrono::steady_clock::time_point start_;
};

std::string manifest_path(const std::string& explicit_path, const std::string& artifact) {
  return explicit_path.empty() ? artifact + ".manifest.json" : explicit_path;
}

AnnotatorPolicy parse_policy(const std::string& name) {
  if (name == "any") return AnnotatorPolicy::kAny;
  if (name == "fixed") return AnnotatorPolicy::kFixed;
  throw UsageError("--annotator-policy must be 'any' or 'fixed'");
}

metric::StdConvention parse_std(const std::string& name) {
  if (name == "population") return metric::StdConvention::kPopulation;
  if (name == "sample") return metric::StdConvention::kSample;
  throw UsageError("--std must be 'population' or 'sample'");
}

PosTag parse_tag_arg(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
  auto tag = parse_pos_tag(name);
  if (!tag || *tag == PosTag::OTHER) throw UsageError("unknown POS tag '" + name + "'");
  return *tag;
}

// "nn:8,jj:8" -> [(NN, 8), (JJ, 8)]; a bare tag means k = 8.
std::vector<std::pair<PosTag, std::size_t>> parse_target_groups(const std::string& spec) {
  std::vector<std::pair<PosTag, std::size_t>> groups;
  for (auto part : split_on(spec, ",")) {
    if (part.empty()) continue;
    auto bits = split_on(part, ":");
    if (bits.size() > 2) throw UsageError("bad --targets entry '" + std::string(part) + "'");
    std::size_t k = 8;
    if (bits.size() == 2) {
      try {
        std::size_t used = 0;
        const std::string num(bits[1]);
        k = std::stoul(num, &used);
        if (used != num.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw UsageError("bad count in --targets entry '" + std::string(part) + "'");
      }
    }
    groups.emplace_back(parse_tag_arg(std::string(bits[0])), k);
  }
  return groups;
}

// "life:NN,good:JJ"
std::vector<attack::Target> parse_target_words(const std::string& spec) {
  std::vector<attack::Target> out;
  for (auto part : split_on(spec, ",")) {
    if (part.empty()) continue;
    auto colon = part.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
      throw UsageError("--target-words entries must be word:TAG, got '" + std::string(part) + "'");
    out.push_back({std::string(part.substr(0, colon)), parse_tag_arg(std::string(part.substr(colon + 1)))});
  }
  return out;
}

SubstitutionDictionary dictionary_from_args(const std::string& dict_path, const std::string& preset,
                                            bool no_capitalized, Manifest& manifest) {
  if (!dict_path.empty() && !preset.empty()) throw UsageError("--dict and --preset are exclusive");
  if (!dict_path.empty()) {
    manifest.input(dict_path);
    return load_dictionary(dict_path);
  }
  if (preset == "m2f") return gender_preset(GenderDirection::kM2F, !no_capitalized);
  if (preset == "f2m") return gender_preset(GenderDirection::kF2M, !no_capitalized);
  if (preset.empty()) throw UsageError("one of --dict or --preset is required");
  throw UsageError("--preset must be m2f or f2m");
}

std::mutex g_servers_mutex;
std::set<GecServer*> g_servers;

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string m2, src, cor, tags, name = "corpus", split = "train", out, manifest;
  bool filter = false;
  std::string policy = "any";
  int annotator = 0;
};

int cmd_ingest(const IngestArgs& a, const OptionRegistry& reg, std::ostream& out) {
  Manifest manifest("ingest", reg);
  const Split split = [&] {
    try {
      return parse_split(a.split);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }();
  if (a.name.empty() || has_whitespace(a.name)) throw UsageError("--name must be a non-empty word");
  Corpus corpus;
  if (!a.m2.empty()) {
    if (!a.src.empty() || !a.cor.empty()) throw UsageError("--m2 excludes --src/--cor");
    manifest.input(a.m2);
    corpus = parse_m2(read_file(a.m2), a.name, split);
  } else if (!a.src.empty() && !a.cor.empty()) {
    manifest.input(a.src);
    manifest.input(a.cor);
    corpus = parse_parallel(read_file(a.src), read_file(a.cor), a.name, split);
  } else {
    throw UsageError("give --m2 FILE or both --src FILE and --cor FILE");
  }
  if (!a.tags.empty()) {
    manifest.input(a.tags);
    attach_tags(corpus, read_file(a.tags));
  }
  const std::size_t before = corpus.examples.size();
  if (a.filter) corpus = filter_incorrect(corpus, parse_policy(a.policy), a.annotator);
  save_corpus(corpus, a.out);
  manifest.output(a.out);
  manifest.extra()["examples_read"] = before;
  manifest.extra()["examples_written"] = corpus.examples.size();
  manifest.write(manifest_path(a.manifest, a.out));
  out << "ingested " << corpus.examples.size() << " of " << before << " examples -> " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- freq

struct FreqArgs {
  std::string corpus, lexicon, out, manifest, policy = "any";
  std::uint64_t min_count = pos::kDefaultMinCount;
  bool no_filter = false, case_insensitive = false;
  int annotator = 0;
};

int cmd_freq(const FreqArgs& a, const OptionRegistry& reg, std::ostream& out) {
  Manifest manifest("freq", reg);
  manifest.input(a.corpus);
  Corpus corpus = load_corpus(a.corpus);
  if (!a.no_filter) corpus = filter_incorrect(corpus, parse_policy(a.policy), a.annotator);
  pos::PosLexicon lexicon(!a.case_insensitive);
  if (!a.lexicon.empty()) {
    manifest.input(a.lexicon);
    lexicon = pos::load_lexicon(a.lexicon, !a.case_insensitive);
  } else {
    for (const auto& ex : corpus.examples)
      if (ex.source.tags.empty()) throw UsageError("--lexicon is required for untagged corpora");
  }
  pos::TagCoverage coverage;
  auto table = pos::build_frequency_table(corpus, lexicon, a.min_count, &coverage);
  write_file(a.out, pos::serialize_frequency_table(table));
  manifest.output(a.out);
  manifest.extra()["sentences"] = corpus.examples.size();
  manifest.extra()["tokens"] = coverage.tokens;
  manifest.extra()["out_of_lexicon"] = coverage.out_of_lexicon;
  manifest.extra()["lexicon_unknown_tag_lines"] = lexicon.unknown_tag_lines;
  manifest.write(manifest_path(a.manifest, a.out));
  out << "frequency table over " << corpus.examples.size() << " sentences -> " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- learn

struct LearnArgs {
  std::string train, lexicon, vocab, freq, targets, target_words, out_dict, out_trajectory, out_table, manifest;
  std::string name = "learned", scope = "affected", std_conv = "population", policy = "any";
  std::uint64_t min_count = pos::kDefaultMinCount;
  std::uint64_t vocab_min_weight = 1;
  bool vocab_any_tag = false, no_filter = false, resume = false, case_insensitive = false;
  std::size_t max_candidates = 0;
  double epsilon = 0.0;
  OracleArgs oracle;
};

int cmd_learn(const LearnArgs& a, const OptionRegistry& reg, std::ostream& out) {
  Manifest manifest("learn", reg);
  if (a.epsilon < 0) throw UsageError("--epsilon must be >= 0");
  if (a.name.empty() || has_whitespace(a.name)) throw UsageError("--name must be a non-empty word");
  manifest.input(a.train);
  const Corpus train = load_corpus(a.train);

  std::optional<pos::PosLexicon> lexicon;
  if (!a.lexicon.empty()) {
    manifest.input(a.lexicon);
    lexicon = pos::load_lexicon(a.lexicon, !a.case_insensitive);
  }

  attack::LearnerConfig config;
  config.epsilon = a.epsilon;
  config.max_candidates = a.max_candidates;
  config.std_convention = parse_std(a.std_conv);
  if (a.scope == "affected")
    config.scope = attack::ObjectiveScope::kAffectedSubset;
  else if (a.scope == "all")
    config.scope = attack::ObjectiveScope::kAll;
  else
    throw UsageError("--scope must be 'affected' or 'all'");

  if (!a.target_words.empty()) {
    config.targets = parse_target_words(a.target_words);
  } else {
    if (a.targets.empty()) throw UsageError("give --targets POS:k,... or --target-words word:TAG,...");
    pos::FrequencyTable table;
    if (!a.freq.empty()) {
      manifest.input(a.freq);
      table = pos::deserialize_frequency_table(read_file(a.freq));
    } else {
      Corpus source = a.no_filter ? train : filter_incorrect(train, parse_policy(a.policy));
      bool tagged = std::all_of(source.examples.begin(), source.examples.end(),
                                [](const ParallelExample& ex) { return !ex.source.tags.empty(); });
      if (!lexicon && !tagged) throw UsageError("--lexicon or --freq is required to select targets");
      table = pos::build_frequency_table(source, lexicon.value_or(pos::PosLexicon()), a.min_count);
    }
    for (auto [tag, k] : parse_target_groups(a.targets))
      for (auto& w : pos::top_k_targets(table, tag, k)) config.targets.push_back({std::move(w), tag});
  }

  attack::CandidateVocab vocab;
  if (!a.vocab.empty()) {
    manifest.input(a.vocab);
    vocab = attack::deserialize_vocab(read_file(a.vocab));
  } else if (lexicon) {
    vocab = attack::build_candidate_vocab(*lexicon, {a.vocab_min_weight, !a.vocab_any_tag});
  } else {
    throw UsageError("--lexicon or --vocab is required to build candidate vocabularies");
  }

  auto oracle = open_oracle(a.oracle);
  for (const auto& f : oracle.input_files) manifest.input(f);

  attack::Checkpoint checkpoint{a.out_dict, a.out_trajectory, a.resume};
  auto outcome = attack::learn_dictionary(config, train, *oracle.oracle, vocab, a.name, &checkpoint);
  manifest.output(a.out_dict);
  manifest.output(a.out_trajectory);
  if (!a.out_table.empty()) {
    write_file(a.out_table, attack::render_trajectory_markdown(outcome.trajectory));
    manifest.output(a.out_table);
  }

  ojson targets = ojson::array();
  for (const auto& t : config.targets) targets.push_back(t.word + ":" + std::string(to_string(t.pos)));
  ojson sizes = ojson::object();
  for (std::size_t t = 0; t < kPosTagCount; ++t)
    if (auto n = vocab.size(static_cast<PosTag>(t))) sizes[std::string(kPosTagNames[t])] = n;
  manifest.extra()["targets"] = targets;
  manifest.extra()["vocab_sizes"] = sizes;
  manifest.extra()["accepted"] = outcome.dictionary.size();
  manifest.oracle(oracle);
  manifest.write(manifest_path(a.manifest, a.out_dict));

  out << "learned " << outcome.dictionary.size() << " of " << config.targets.size() << " substitutions -> "
      << a.out_dict << "\n";
  return kOk;
}

// ---------------------------------------------------------------- attack

struct AttackArgs {
  std::string corpus, dict, preset, out, manifest;
  bool no_capitalized = false;
};

int cmd_attack(const AttackArgs& a, const OptionRegistry& reg, std::ostream& out) {
  Manifest manifest("attack", reg);
  manifest.input(a.corpus);
  Corpus corpus = load_corpus(a.corpus);
  const auto dict = dictionary_from_args(a.dict, a.preset, a.no_capitalized, manifest);
  std::size_t changed = 0;
  for (auto& ex : corpus.examples) {
    auto attacked = apply(dict, ex.source);
    if (attacked.tokens != ex.source.tokens) ++changed;
    ex.source = std::move(attacked);
    materialize_corrected(ex);
  }
  save_corpus(corpus, a.out);
  manifest.output(a.out);
  manifest.extra()["dictionary"] = dict.name();
  manifest.extra()["sentences_changed"] = changed;
  manifest.write(manifest_path(a.manifest, a.out));
  out << "attacked " << changed << " of " << corpus.examples.size() << " sentences -> " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string corpus, dict, preset, format = "markdown", out, manifest, std_conv = "population";
  bool gender_subsets = false, no_union = false, no_per_target = false, no_capitalized = false;
  OracleArgs oracle;
};

int cmd_eval(const EvalArgs& a, const OptionRegistry& reg, std::ostream& out) {
  Manifest manifest("eval", reg);
  const auto format = [&] {
    try {
      return eval::parse_format(a.format);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }();
  manifest.input(a.corpus);
  const Corpus corpus = load_corpus(a.corpus);
  const auto dict = dictionary_from_args(a.dict, a.preset, a.no_capitalized, manifest);
  eval::SubsetSpec spec;
  spec.union_affected = !a.no_union;
  spec.per_target = !a.no_per_target;
  spec.std_convention = parse_std(a.std_conv);
  if (a.gender_subsets) {
    spec.extra.push_back({"gender-m", gender_words(GenderDirection::kM2F, !a.no_capitalized)});
    spec.extra.push_back({"gender-f", gender_words(GenderDirection::kF2M, !a.no_capitalized)});
  }
  auto oracle = open_oracle(a.oracle);
  for (const auto& f : oracle.input_files) manifest.input(f);
  const auto report = eval::evaluate_attack(corpus, *oracle.oracle, dict, spec);
  write_file(a.out, eval::render_report(report, format));
  manifest.output(a.out);
  manifest.oracle(oracle);
  manifest.write(manifest_path(a.manifest, a.out));
  out << "evaluated " << report.rows.size() << " subsets -> " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- serve-mock

struct ServeArgs {
  std::string rules, host = "127.0.0.1";
  int port = 8475;
};

int cmd_serve_mock(const ServeArgs& a, std::ostream& out) {
  auto oracle = std::make_shared<MockOracle>(load_mock_rules(a.rules));
  GecServer server(oracle);
  const int port = server.bind(a.host, a.port);
  if (port < 0) throw IoError(a.host + ":" + std::to_string(a.port), "cannot bind");
  {
    std::lock_guard lock(g_servers_mutex);
    g_servers.insert(&server);
  }
  out << "serving " << oracle->fingerprint() << " on http://" << a.host << ":" << port << std::endl;
  server.listen();
  std::lock_guard lock(g_servers_mutex);
  g_servers.erase(&server);
  return kOk;
}

// ---------------------------------------------------------------- cache

struct CacheArgs {
  std::string action, cache_dir, manifest;
};

int cmd_cache(const CacheArgs& a, const OptionRegistry& reg, std::ostream& out) {
  if (a.cache_dir.empty()) throw UsageError("--cache DIR is required (or set GECAL_CACHE_DIR)");
  const std::string path = (fs::path(a.cache_dir) / kCacheFileName).string();
  if (a.action == "stats") {
    auto stats = cache_file_stats(path);
    ojson j;
    j["path"] = path;
    j["lines"] = stats.lines;
    j["malformed"] = stats.malformed;
    j["entries"] = ojson::object();
    for (const auto& [fp, n] : stats.entries_per_fingerprint) j["entries"][fp] = n;
    out << j.dump(2) << "\n";
    return kOk;
  }
  if (a.action == "compact") {
    Manifest manifest("cache", reg);
    manifest.input(path);
    const auto dropped = compact_cache_file(path);
    manifest.output(path);
    manifest.extra()["lines_dropped"] = dropped;
    manifest.write(manifest_path(a.manifest, path));
    out << "compacted " << path << ": dropped " << dropped << " lines\n";
    return kOk;
  }
  throw UsageError("cache action must be 'stats' or 'compact'");
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

bool stop_servers() {
  std::lock_guard lock(g_servers_mutex);
  for (auto* s : g_servers) s->stop();
  return !g_servers.empty();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edit-count fluency scoring and universal substitution attacks on GEC systems", "gecal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert M2 or parallel text into a canonical corpus");
  OptionRegistry ingest_reg(ingest_cmd);
  ingest_reg.option("--m2", ingest.m2, "M2 annotation file");
  ingest_reg.option("--src", ingest.src, "Source sentences, one per line");
  ingest_reg.option("--cor", ingest.cor, "Corrected sentences, one per line");
  ingest_reg.option("--tags", ingest.tags, "Gold POS tags, one line per sentence");
  ingest_reg.option("--name", ingest.name, "Corpus name");
  ingest_reg.option("--split", ingest.split, "train, dev or test");
  ingest_reg.flag("--filter-incorrect", ingest.filter, "Keep only sentences with reference edits");
  ingest_reg.option("--annotator-policy", ingest.policy, "any or fixed");
  ingest_reg.option("--annotator", ingest.annotator, "Annotator for the fixed policy");
  ingest_reg.option("--out", ingest.out, "Output corpus file")->required();
  ingest_reg.option("--manifest", ingest.manifest, "Manifest path (default <out>.manifest.json)");

  FreqArgs freq;
  auto* freq_cmd = app.add_subcommand("freq", "Build the POS-stratified frequency table");
  OptionRegistry freq_reg(freq_cmd);
  freq_reg.option("--corpus", freq.corpus, "Canonical corpus file")->required();
  freq_reg.option("--lexicon", freq.lexicon, "POS lexicon (word TAG count)");
  freq_reg.option("--min-count", freq.min_count, "Drop words below this count");
  freq_reg.flag("--no-filter", freq.no_filter, "Count over all sentences, not only incorrect ones");
  freq_reg.option("--annotator-policy", freq.policy, "any or fixed");
  freq_reg.option("--annotator", freq.annotator, "Annotator for the fixed policy");
  freq_reg.flag("--case-insensitive", freq.case_insensitive, "Case-insensitive lexicon lookup");
  freq_reg.option("--out", freq.out, "Output frequency table")->required();
  freq_reg.option("--manifest", freq.manifest, "Manifest path");

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "Greedily learn a universal substitution dictionary");
  OptionRegistry learn_reg(learn_cmd);
  learn_reg.option("--train", learn.train, "Training corpus")->required();
  learn_reg.option("--lexicon", learn.lexicon, "POS lexicon for targets and candidates");
  learn_reg.option("--vocab", learn.vocab, "Candidate vocabulary file (overrides the lexicon)");
  learn_reg.option("--freq", learn.freq, "Frequency table for target selection");
  learn_reg.option("--targets", learn.targets, "Target groups, e.g. nn:8,jj:8,rb:8");
  learn_reg.option("--target-words", learn.target_words, "Explicit targets, e.g. life:NN,good:JJ");
  learn_reg.option("--min-count", learn.min_count, "Frequency threshold when building the table");
  learn_reg.flag("--no-filter", learn.no_filter, "Select targets from all sentences");
  learn_reg.option("--annotator-policy", learn.policy, "any or fixed");
  learn_reg.option("--vocab-min-weight", learn.vocab_min_weight, "Minimum lexicon weight for candidates");
  learn_reg.flag("--vocab-any-tag", learn.vocab_any_tag, "Allow candidates under any listed tag");
  learn_reg.flag("--case-insensitive", learn.case_insensitive, "Case-insensitive lexicon lookup");
  learn_reg.option("--max-candidates", learn.max_candidates, "Candidates per target (0 = all)");
  learn_reg.option("--epsilon", learn.epsilon, "Minimum objective drop to accept");
  learn_reg.option("--scope", learn.scope, "Objective scope: affected or all");
  learn_reg.option("--std", learn.std_conv, "population or sample");
  learn_reg.option("--name", learn.name, "Dictionary name");
  learn_reg.option("--out-dict", learn.out_dict, "Output dictionary")->required();
  learn_reg.option("--out-trajectory", learn.out_trajectory, "Output trajectory (JSON lines)")->required();
  learn_reg.option("--out-table", learn.out_table, "Optional markdown trajectory table");
  learn_reg.flag("--resume", learn.resume, "Resume from existing output files");
  learn_reg.option("--manifest", learn.manifest, "Manifest path");
  learn.oracle.register_on(learn_reg);

  AttackArgs atk;
  auto* attack_cmd = app.add_subcommand("attack", "Apply a substitution dictionary to a corpus");
  OptionRegistry attack_reg(attack_cmd);
  attack_reg.option("--corpus", atk.corpus, "Canonical corpus file")->required();
  attack_reg.option("--dict", atk.dict, "Dictionary file");
  attack_reg.option("--preset", atk.preset, "Gender preset: m2f or f2m");
  attack_reg.flag("--no-capitalized", atk.no_capitalized, "Presets without capitalized variants");
  attack_reg.option("--out", atk.out, "Output corpus")->required();
  attack_reg.option("--manifest", atk.manifest, "Manifest path");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Baseline vs attacked mean edits");
  OptionRegistry eval_reg(eval_cmd);
  eval_reg.option("--corpus", ev.corpus, "Canonical corpus file")->required();
  eval_reg.option("--dict", ev.dict, "Dictionary file");
  eval_reg.option("--preset", ev.preset, "Gender preset: m2f or f2m");
  eval_reg.flag("--no-capitalized", ev.no_capitalized, "Presets without capitalized variants");
  eval_reg.flag("--gender-subsets", ev.gender_subsets, "Add gender-m / gender-f subsets");
  eval_reg.flag("--no-union", ev.no_union, "Omit the union-affected subset");
  eval_reg.flag("--no-per-target", ev.no_per_target, "Omit per-target subsets");
  eval_reg.option("--std", ev.std_conv, "population or sample");
  eval_reg.option("--format", ev.format, "markdown, csv or json");
  eval_reg.option("--out", ev.out, "Output report")->required();
  eval_reg.option("--manifest", ev.manifest, "Manifest path");
  ev.oracle.register_on(eval_reg);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve-mock", "Serve the rule-based mock corrector over HTTP");
  serve_cmd->add_option("--rules", serve.rules, "Mock rules file")->required();
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port (0 = any free port)");

  CacheArgs cache;
  if (const char* env = std::getenv("GECAL_CACHE_DIR")) cache.cache_dir = env;
  auto* cache_cmd = app.add_subcommand("cache", "Inspect or compact a query cache");
  OptionRegistry cache_reg(cache_cmd);
  cache_cmd->add_option("action", cache.action, "stats or compact")->required();
  cache_reg.option("--cache", cache.cache_dir, "Cache directory");
  cache_reg.option("--manifest", cache.manifest, "Manifest path (compact)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolkitVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gecal: error[usage]: " << one_line(e.what()) << "\n";
    return kUsage;
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(ingest, ingest_reg, out);
    if (freq_cmd->parsed()) return cmd_freq(freq, freq_reg, out);
    if (learn_cmd->parsed()) return cmd_learn(learn, learn_reg, out);
    if (attack_cmd->parsed()) return cmd_attack(atk, attack_reg, out);
    if (eval_cmd->parsed()) return cmd_eval(ev, eval_reg, out);
    if (serve_cmd->parsed()) return cmd_serve_mock(serve, out);
    if (cache_cmd->parsed()) return cmd_cache(cache, cache_reg, out);
  } catch (const UsageError& e) {
    err << "gecal: error[usage]: " << one_line(e.what()) << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "gecal: error[io]: " << one_line(e.what()) << "\n";
    return kIo;
  } catch (const ParseError& e) {
    err << "gecal: error[format]: " << one_line(e.what()) << "\n";
    return kFormat;
  } catch (const ProtocolError& e) {
    err << "gecal: error[protocol]: " << one_line(e.what()) << "\n";
    return kProtocol;
  } catch (const OracleError& e) {
    err << "gecal: error[oracle]: " << one_line(e.what()) << "\n";
    return kOracle;
  } catch (const fs::filesystem_error& e) {
    err << "gecal: error[io]: " << one_line(e.what()) << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "gecal: error[internal]: " << one_line(e.what()) << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace gecal::cli
