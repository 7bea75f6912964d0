#include "gecal/gec_server.hpp"

#include "gecal/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gecal {
namespace {

using json = nlohmann::json;

HttpReply error_reply(int status, const std::string& message) {
  return {status, json{{"error", message}}.dump()};
}

}  // namespace

HttpReply handle_health(const GecOracle& oracle) {
  return {200, json{{"status", "ok"}, {"model", oracle.fingerprint()}}.dump()};
}

HttpReply handle_correct(GecOracle& oracle, std::string_view request_body) {
  json doc;
  try {
    doc = json::parse(request_body);
  } catch (const json::exception&) {
    return error_reply(400, "request body is not valid JSON");
  }
  if (!doc.is_object() || !doc.contains("sentences") || !doc["sentences"].is_array())
    return error_reply(400, "request must be an object with a 'sentences' array");

  std::vector<Tokens> sentences;
  sentences.reserve(doc["sentences"].size());
  for (const auto& s : doc["sentences"]) {
    if (!s.is_array()) return error_reply(400, "each sentence must be an array of tokens");
    Tokens toks;
    for (const auto& t : s) {
      if (!t.is_string()) return error_reply(400, "tokens must be strings");
      toks.push_back(t.get<std::string>());
    }
    sentences.push_back(std::move(toks));
  }

  std::vector<Tokens> corrections;
  try {
    corrections = oracle.correct_batch(sentences);
  } catch (const std::exception& e) {
    return error_reply(500, e.what());
  }
  json out = {{"corrections", json::array()}, {"model", oracle.fingerprint()}};
  for (auto& c : corrections) out["corrections"].push_back(std::move(c));
  return {200, out.dump()};
}

struct GecServer::Impl {
  std::shared_ptr<GecOracle> oracle;
  httplib::Server server;
};

GecServer::GecServer(std::shared_ptr<GecOracle> oracle) : impl_(std::make_unique<Impl>()) {
  impl_->oracle = std::move(oracle);
  auto* impl = impl_.get();
  impl_->server.Get("/health", [impl](const httplib::Request&, httplib::Response& res) {
    auto reply = handle_health(*impl->oracle);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  impl_->server.Post("/correct", [impl](const httplib::Request& req, httplib::Response& res) {
    auto reply = handle_correct(*impl->oracle, req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
}

GecServer::~GecServer() { stop(); }

int GecServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool GecServer::listen() { return impl_->server.listen_after_bind(); }

void GecServer::stop() {
  if (impl_) impl_->server.stop();
}

void GecServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace gecal
