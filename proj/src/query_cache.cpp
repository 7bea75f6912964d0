#include "gecal/query_cache.hpp"

#include <filesystem>
#include <map>
#include <unordered_set>

#include "gecal/error.hpp"

namespace gecal {
namespace {

struct CacheLine {
  std::string_view fingerprint;
  std::string_view key;
  std::string_view corrected;
};

std::optional<CacheLine> parse_cache_line(std::string_view line) {
  auto fields = split_on(line, "\t");
  if (fields.size() != 3 || fields[0].empty()) return std::nullopt;
  return CacheLine{fields[0], fields[1], fields[2]};
}

}  // namespace

QueryCache::QueryCache(std::string fingerprint) : fingerprint_(std::move(fingerprint)) {}

QueryCache::QueryCache(std::string fingerprint, std::string path)
    : fingerprint_(std::move(fingerprint)), path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    const std::string text = read_file(path_);
    for (auto line : split_lines(text)) {
      auto parsed = parse_cache_line(line);
      // A torn final line from an interrupted run is skipped.
      if (!parsed || parsed->fingerprint != fingerprint_) continue;
      store_[std::string(parsed->key)] = split_ws(parsed->corrected);
    }
  } else if (auto parent = std::filesystem::path(path_).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw IoError(path_, "cannot open cache for appending");
}

std::string QueryCache::key(std::span<const std::string> sentence) {
  std::string k;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (i) k += ' ';
    k += sentence[i];
  }
  return k;
}

std::optional<Tokens> QueryCache::lookup(std::span<const std::string> sentence) {
  const std::string k = key(sentence);
  std::shared_lock lock(mutex_);
  auto it = store_.find(k);
  if (it == store_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void QueryCache::insert(std::span<const std::string> sentence, const Tokens& corrected) {
  const Tokens owned(sentence.begin(), sentence.end());
  insert_many(std::span<const Tokens>(&owned, 1), std::span<const Tokens>(&corrected, 1));
}

void QueryCache::insert_many(std::span<const Tokens> sentences, std::span<const Tokens> corrected) {
  if (sentences.empty()) return;
  std::unique_lock lock(mutex_);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::string k = key(sentences[i]);
    if (out_.is_open()) out_ << fingerprint_ << '\t' << k << '\t' << join(corrected[i]) << '\n';
    store_[std::move(k)] = corrected[i];
  }
  if (out_.is_open()) {
    out_.flush();
    if (!out_) throw IoError(path_, "cache append failed");
  }
}

std::size_t QueryCache::size() const {
  std::shared_lock lock(mutex_);
  return store_.size();
}

CachedOracle::CachedOracle(std::shared_ptr<GecOracle> inner, std::shared_ptr<QueryCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
  if (inner_->fingerprint() != cache_->fingerprint())
    throw Error("cache fingerprint '" + cache_->fingerprint() + "' does not match backend '" +
                inner_->fingerprint() + "'");
}

std::vector<Tokens> CachedOracle::do_correct_batch(std::span<const Tokens> sentences) {
  std::vector<Tokens> out(sentences.size());
  std::vector<Tokens> misses;
  std::map<std::string, std::vector<std::size_t>> miss_positions;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (auto hit = cache_->lookup(sentences[i])) {
      out[i] = std::move(*hit);
      continue;
    }
    auto [it, fresh] = miss_positions.try_emplace(QueryCache::key(sentences[i]));
    if (fresh) misses.push_back(sentences[i]);
    it->second.push_back(i);
  }
  if (misses.empty()) return out;

  auto corrected = inner_->correct_batch(misses);
  cache_->insert_many(misses, corrected);
  for (std::size_t m = 0; m < misses.size(); ++m)
    for (auto pos : miss_positions[QueryCache::key(misses[m])]) out[pos] = corrected[m];
  return out;
}

std::shared_ptr<GecOracle> cached(std::shared_ptr<GecOracle> inner, std::shared_ptr<QueryCache> cache) {
  return std::make_shared<CachedOracle>(std::move(inner), std::move(cache));
}

CacheFileStats cache_file_stats(const std::string& path) {
  CacheFileStats stats;
  const std::string text = read_file(path);
  std::map<std::string, std::unordered_set<std::string>> keys;
  for (auto line : split_lines(text)) {
    ++stats.lines;
    auto parsed = parse_cache_line(line);
    if (!parsed) {
      ++stats.malformed;
      continue;
    }
    keys[std::string(parsed->fingerprint)].insert(std::string(parsed->key));
  }
  for (const auto& [fp, set] : keys) stats.entries_per_fingerprint.emplace_back(fp, set.size());
  return stats;
}

std::size_t compact_cache_file(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::pair<std::string, std::string>> order;  // (fp\tkey, corrected)
  std::unordered_map<std::string, std::size_t> index;
  std::size_t lines = 0;
  for (auto line : split_lines(text)) {
    ++lines;
    auto parsed = parse_cache_line(line);
    if (!parsed) continue;
    std::string id = std::string(parsed->fingerprint) + "\t" + std::string(parsed->key);
    auto [it, fresh] = index.try_emplace(id, order.size());
    if (fresh)
      order.emplace_back(std::move(id), std::string(parsed->corrected));
    else
      order[it->second].second = std::string(parsed->corrected);
  }
  std::string out;
  for (const auto& [id, corrected] : order) out += id + "\t" + corrected + "\n";
  const std::string tmp = path + ".tmp";
  write_file(tmp, out);
  std::filesystem::rename(tmp, path);
  return lines - order.size();
}

}  // namespace gecal
