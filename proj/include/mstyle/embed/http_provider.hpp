#pragma once

#include <string>
#include <vector>

#include <httplib.h>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/embed/provider.hpp"

namespace mstyle {

/// Client for an external embedding service.
///
/// Wire protocol: POST {base_url}/embed with {"texts": [...]}; the reply is
/// {"vectors": [[...], ...], "dim": int} with status 200. Transport failures
/// are retried `retries` times before giving up. A non-200 status, a vector
/// count that differs from the request, or vectors whose length disagrees
/// with "dim" are protocol errors and are not retried.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  struct Options {
    std::string base_url;  // e.g. "http://127.0.0.1:8080"
    std::size_t dim = 0;   // 0: learn it from the first reply
    int retries = 2;
    int timeout_seconds = 30;
    std::size_t max_batch = 256;
  };

  explicit HttpEmbeddingProvider(Options opts) : opts_(std::move(opts)) {
    require(!opts_.base_url.empty(), Errc::validation, "http_service: empty url");
    require(opts_.max_batch > 0, Errc::validation, "http_service: max_batch must be > 0");
  }

  ProviderKind kind() const override { return ProviderKind::http_service; }

  std::size_t dim() override {
    if (opts_.dim == 0) {
      const std::string probe = "dimension probe";
      opts_.dim = embed(probe).dim();
    }
    return opts_.dim;
  }

 protected:
  std::vector<EmbeddingVector> compute(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += opts_.max_batch) {
      const auto chunk = texts.subspan(start, std::min(opts_.max_batch, texts.size() - start));
      auto part = request(chunk);
      for (auto& v : part) out.push_back(std::move(v));
    }
    return out;
  }

 private:
  std::vector<EmbeddingVector> request(std::span<const std::string> texts) {
    Json body;
    body["texts"] = Json::array();
    for (const auto& t : texts) body["texts"].push_back(t);
    const std::string payload = body.dump();

    httplib::Client client(opts_.base_url);
    client.set_connection_timeout(opts_.timeout_seconds, 0);
    client.set_read_timeout(opts_.timeout_seconds, 0);
    client.set_write_timeout(opts_.timeout_seconds, 0);

    httplib::Result res;
    int attempts = 0;
    for (; attempts <= opts_.retries; ++attempts) {
      res = client.Post("/embed", payload, "application/json");
      if (res) break;
    }
    if (!res)
      fail(Errc::transport, "embedding service " + opts_.base_url + " unreachable after " +
                                std::to_string(attempts) + " attempts (" +
                                httplib::to_string(res.error()) + ")");
    if (res->status != 200)
      fail(Errc::protocol, "embedding service returned HTTP " + std::to_string(res->status));

    Json reply;
    try {
      reply = Json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::protocol, std::string("embedding service reply is not JSON: ") + e.what());
    }
    std::vector<std::vector<double>> vectors;
    std::size_t dim = 0;
    try {
      vectors = reply.at("vectors").get<std::vector<std::vector<double>>>();
      dim = reply.at("dim").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::protocol, std::string("malformed embedding service reply: ") + e.what());
    }
    if (vectors.size() != texts.size())
      fail(Errc::protocol, "embedding service returned " + std::to_string(vectors.size()) +
                               " vectors for " + std::to_string(texts.size()) + " texts");
    std::vector<EmbeddingVector> out;
    out.reserve(vectors.size());
    for (auto& v : vectors) {
      if (v.size() != dim)
        fail(Errc::protocol, "embedding service vector length " + std::to_string(v.size()) +
                                 " disagrees with declared dim " + std::to_string(dim));
      out.emplace_back(std::move(v));
    }
    return out;
  }

  Options opts_;
};

}  // namespace mstyle
