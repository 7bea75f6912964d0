#include "gecal/http_oracle.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "gecal/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gecal {
namespace {

using json = nlohmann::json;

httplib::Client make_client(const std::string& endpoint, const HttpOptions& options) {
  httplib::Client client(endpoint);
  if (!client.is_valid()) throw OracleError("invalid endpoint '" + endpoint + "'", false);
  const auto secs = options.timeout.count() / 1000;
  const auto usecs = (options.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  return client;
}

std::vector<Tokens> parse_corrections(const std::string& body, std::size_t expected,
                                      const std::string* expected_model) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("corrections") || !doc["corrections"].is_array())
    throw ProtocolError("response lacks a 'corrections' array");
  const auto& arr = doc["corrections"];
  if (arr.size() != expected)
    throw ProtocolError("server returned " + std::to_string(arr.size()) + " corrections for " +
                        std::to_string(expected) + " sentences");
  if (expected_model) {
    if (!doc.contains("model") || !doc["model"].is_string() || doc["model"].get<std::string>() != *expected_model)
      throw ProtocolError("response model does not match handshake fingerprint '" + *expected_model + "'");
  }
  std::vector<Tokens> out;
  out.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_array()) throw ProtocolError("correction is not a token array");
    Tokens toks;
    for (const auto& t : item) {
      if (!t.is_string()) throw ProtocolError("correction token is not a string");
      toks.push_back(t.get<std::string>());
    }
    out.push_back(std::move(toks));
  }
  return out;
}

std::vector<Tokens> post_one_batch(const std::string& endpoint, std::span<const Tokens> batch,
                                   const HttpOptions& options, const std::string* expected_model,
                                   const std::string& label) {
  json request = {{"sentences", json::array()}};
  for (const auto& s : batch) request["sentences"].push_back(s);
  const std::string body = request.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options.retry_backoff * (1 << std::min(attempt - 1, 6)));
    auto client = make_client(endpoint, options);
    auto res = client.Post("/correct", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw OracleError(label + ": HTTP " + std::to_string(res->status) + ": " + res->body, false);
    try {
      return parse_corrections(res->body, batch.size(), expected_model);
    } catch (const ProtocolError& e) {
      throw ProtocolError(label + ": " + e.what());
    }
  }
  throw OracleError(label + " failed after " + std::to_string(options.retries + 1) + " attempts: " + last_error,
                    true);
}

std::vector<Tokens> correct_batches(const std::string& endpoint, std::span<const Tokens> sentences,
                                    const HttpOptions& options, const std::string* expected_model) {
  if (sentences.empty()) return {};
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  const std::size_t batches = (sentences.size() + batch_size - 1) / batch_size;

  std::vector<std::vector<Tokens>> results(batches);
  for (std::size_t wave = 0; wave < batches; wave += jobs) {
    std::vector<std::future<std::vector<Tokens>>> inflight;
    const std::size_t wave_end = std::min(batches, wave + jobs);
    for (std::size_t b = wave; b < wave_end; ++b) {
      const std::size_t lo = b * batch_size;
      const std::size_t hi = std::min(sentences.size(), lo + batch_size);
      const std::string label = "batch " + std::to_string(b) + " (sentences " + std::to_string(lo) + ".." +
                                std::to_string(hi - 1) + ")";
      auto slice = sentences.subspan(lo, hi - lo);
      if (jobs == 1) {
        results[b] = post_one_batch(endpoint, slice, options, expected_model, label);
      } else {
        inflight.push_back(std::async(std::launch::async, [=, &options] {
          return post_one_batch(endpoint, slice, options, expected_model, label);
        }));
      }
    }
    // get() in batch order so the first failing batch is the one reported.
    for (std::size_t k = 0; k < inflight.size(); ++k) results[wave + k] = inflight[k].get();
  }

  std::vector<Tokens> out;
  out.reserve(sentences.size());
  for (auto& r : results)
    for (auto& t : r) out.push_back(std::move(t));
  return out;
}

}  // namespace

std::vector<Tokens> http_correct_batch(const std::string& endpoint, std::span<const Tokens> sentences,
                                       const HttpOptions& options) {
  return correct_batches(endpoint, sentences, options, nullptr);
}

std::string http_health(const std::string& endpoint, const HttpOptions& options) {
  std::string last_error;
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options.retry_backoff);
    auto client = make_client(endpoint, options);
    auto res = client.Get("/health");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status >= 500) continue;
      break;
    }
    json doc;
    try {
      doc = json::parse(res->body);
    } catch (const json::exception&) {
      throw ProtocolError("health response is not JSON");
    }
    if (!doc.is_object() || doc.value("status", "") != "ok" || !doc.contains("model") || !doc["model"].is_string())
      throw ProtocolError("health response must be {\"status\":\"ok\",\"model\":...}");
    const auto model = doc["model"].get<std::string>();
    if (model.empty() || model.find_first_of("\t\n") != std::string::npos)
      throw ProtocolError("invalid model fingerprint");
    return model;
  }
  throw OracleError("health check of " + endpoint + " failed: " + last_error, true);
}

HttpOracle::HttpOracle(std::string endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)), options_(options), fingerprint_(http_health(endpoint_, options_)) {
  const std::vector<Tokens> probe = {{"This", "are", "a", "determinism", "probe", "."}};
  auto first = correct_batches(endpoint_, probe, options_, &fingerprint_);
  auto second = correct_batches(endpoint_, probe, options_, &fingerprint_);
  if (first != second) throw ProtocolError("backend " + endpoint_ + " is not deterministic");
}

std::vector<Tokens> HttpOracle::do_correct_batch(std::span<const Tokens> sentences) {
  return correct_batches(endpoint_, sentences, options_, &fingerprint_);
}

}  // namespace gecal
