#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gecal/oracle.hpp"
#include "gecal/text.hpp"

namespace gecal {

struct HttpOptions {
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{30000};
  int retries = 3;
  std::chrono::milliseconds retry_backoff{200};
  // Concurrent in-flight batches.
  std::size_t jobs = 1;
};

/// Splits `sentences` into batches and POSTs each to `<endpoint>/correct`.
/// Order and length are preserved.
std::vector<Tokens> http_correct_batch(const std::string& endpoint,
                                       std::span<const Tokens> sentences,
                                       const HttpOptions& options = {});

/// Client for a remote corrector speaking the /health + /correct protocol.
class HttpOracle : public GecOracle {
 public:
  /// Performs the health handshake and a determinism probe (the same
  /// sentence corrected twice must agree).
  explicit HttpOracle(std::string endpoint, HttpOptions options = {});

  std::string fingerprint() const override { return fingerprint_; }
  const std::string& endpoint() const { return endpoint_; }

 protected:
  std::vector<Tokens> do_correct_batch(std::span<const Tokens> sentences) override;

 private:
  std::string endpoint_;
  HttpOptions options_;
  std::string fingerprint_;
};

/// GET /health; returns the model fingerprint.
std::string http_health(const std::string& endpoint, const HttpOptions& options = {});

}  // namespace gecal
