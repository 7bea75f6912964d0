#pragma once

#include <atomic>
#include <cstddef>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gecal/oracle.hpp"
#include "gecal/text.hpp"

namespace gecal {

/// Persistent correction cache bound to one backend fingerprint. Backing file
/// is append-only `<fingerprint>\t<key>\t<corrected>` lines; on reload the
/// last line for a key wins and lines of other fingerprints are ignored.
class QueryCache {
 public:
  /// In-memory only.
  explicit QueryCache(std::string fingerprint);
  /// Loads `path` if it exists and appends new entries to it.
  QueryCache(std::string fingerprint, std::string path);

  QueryCache(const QueryCache&) = delete;
  QueryCache& operator=(const QueryCache&) = delete;

  const std::string& fingerprint() const { return fingerprint_; }

  std::optional<Tokens> lookup(std::span<const std::string> sentence);
  void insert(std::span<const std::string> sentence, const Tokens& corrected);
  void insert_many(std::span<const Tokens> sentences, std::span<const Tokens> corrected);

  std::size_t size() const;
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

  static std::string key(std::span<const std::string> sentence);

 private:
  std::string fingerprint_;
  std::string path_;
  std::ofstream out_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, Tokens> store_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

/// Serves hits from the cache and forwards only distinct misses to `inner`.
class CachedOracle : public GecOracle {
 public:
  /// Throws Error when the cache belongs to a different backend.
  CachedOracle(std::shared_ptr<GecOracle> inner, std::shared_ptr<QueryCache> cache);

  std::string fingerprint() const override { return inner_->fingerprint(); }
  const QueryCache& cache() const { return *cache_; }
  const GecOracle& inner() const { return *inner_; }

 protected:
  std::vector<Tokens> do_correct_batch(std::span<const Tokens> sentences) override;

 private:
  std::shared_ptr<GecOracle> inner_;
  std::shared_ptr<QueryCache> cache_;
};

std::shared_ptr<GecOracle> cached(std::shared_ptr<GecOracle> inner,
                                  std::shared_ptr<QueryCache> cache);

struct CacheFileStats {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  // Distinct keys per fingerprint after last-write-wins.
  std::vector<std::pair<std::string, std::size_t>> entries_per_fingerprint;
};

CacheFileStats cache_file_stats(const std::string& path);

/// Rewrites the cache file keeping only the last line per (fingerprint, key),
/// in first-seen order. Returns the number of lines dropped.
std::size_t compact_cache_file(const std::string& path);

}  // namespace gecal
