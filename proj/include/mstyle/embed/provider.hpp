#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/text.hpp"
#include "mstyle/embed/hashed_ngram.hpp"
#include "mstyle/embed/vector.hpp"

namespace mstyle {

enum class ProviderKind { vector_file, http_service, hashed_ngram, trained_model, custom };

inline std::string to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::vector_file: return "vector_file";
    case ProviderKind::http_service: return "http_service";
    case ProviderKind::hashed_ngram: return "hashed_ngram";
    case ProviderKind::trained_model: return "trained_model";
    case ProviderKind::custom: return "custom";
  }
  return "custom";
}

/// Source of text embeddings.
///
/// Subclasses implement compute(); the public entry points add a per-process
/// cache keyed by the exact text and enforce one dimension across everything
/// the provider returns. Safe for concurrent callers as long as compute() is.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual ProviderKind kind() const = 0;
  virtual std::size_t dim() = 0;

  EmbeddingVector embed(const std::string& text) {
    return embed_batch(std::span<const std::string>(&text, 1)).front();
  }

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) {
    require(!texts.empty(), Errc::precondition, "embed_batch: empty text list");
    std::vector<std::string> misses;
    {
      std::lock_guard lock(mu_);
      std::unordered_map<std::string_view, bool> queued;
      for (const auto& t : texts)
        if (!cache_.count(t) && !queued[t]) {
          queued[t] = true;
          misses.push_back(t);
        }
    }
    if (!misses.empty()) {
      auto computed = compute(misses);
      if (computed.size() != misses.size())
        fail(Errc::protocol, "provider returned " + std::to_string(computed.size()) +
                                 " vectors for " + std::to_string(misses.size()) +
                                 " texts");
      std::lock_guard lock(mu_);
      for (std::size_t i = 0; i < misses.size(); ++i) {
        check_dim(computed[i].dim());
        cache_.emplace(misses[i], std::move(computed[i]));
      }
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    std::lock_guard lock(mu_);
    for (const auto& t : texts) out.push_back(cache_.at(t));
    return out;
  }

  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) {
    return embed_batch(std::span<const std::string>(texts));
  }

  std::size_t cache_size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
  }

 protected:
  virtual std::vector<EmbeddingVector> compute(std::span<const std::string> texts) = 0;

 private:
  void check_dim(std::size_t d) {
    if (seen_dim_ == 0) seen_dim_ = d;
    if (d != seen_dim_)
      fail(Errc::shape, "embedding dimension drifted from " +
                            std::to_string(seen_dim_) + " to " + std::to_string(d));
  }

  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
  std::size_t seen_dim_ = 0;
};

using ProviderPtr = std::shared_ptr<EmbeddingProvider>;

class HashedNgramProvider final : public EmbeddingProvider {
 public:
  explicit HashedNgramProvider(std::size_t dim = 256, NgramRange range = {})
      : dim_(dim), range_(range) {
    // Validates the parameters eagerly.
    (void)hashed_ngram_embed("probe", dim_, range_);
  }

  ProviderKind kind() const override { return ProviderKind::hashed_ngram; }
  std::size_t dim() override { return dim_; }
  NgramRange range() const { return range_; }

 protected:
  std::vector<EmbeddingVector> compute(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hashed_ngram_embed(t, dim_, range_));
    return out;
  }

 private:
  std::size_t dim_;
  NgramRange range_;
};

/// Looks vectors up by exact (NFC-normalized) text from a JSONL file of
/// {"text", "vector"} objects.
class VectorFileProvider final : public EmbeddingProvider {
 public:
  explicit VectorFileProvider(const std::filesystem::path& path) {
    io::for_each_jsonl(io::read_file(path), path.string(),
                       [&](const Json& j, std::size_t) {
                         add(field<std::string>(j, "text"),
                             field<std::vector<double>>(j, "vector"));
                       });
  }

  VectorFileProvider() = default;

  void add(const std::string& text, std::vector<double> values) {
    EmbeddingVector v(std::move(values));
    if (dim_ == 0) dim_ = v.dim();
    if (v.dim() != dim_)
      fail(Errc::shape, "vector for \"" + text + "\" has dim " +
                            std::to_string(v.dim()) + ", expected " +
                            std::to_string(dim_));
    table_.insert_or_assign(text::nfc(text), std::move(v));
  }

  ProviderKind kind() const override { return ProviderKind::vector_file; }
  std::size_t dim() override {
    require(dim_ > 0, Errc::validation, "vector file provider is empty");
    return dim_;
  }
  std::size_t size() const { return table_.size(); }

 protected:
  std::vector<EmbeddingVector> compute(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      const auto it = table_.find(text::nfc(t));
      if (it == table_.end())
        fail(Errc::missing_key, "no vector for text \"" + t + "\"");
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::unordered_map<std::string, EmbeddingVector> table_;
  std::size_t dim_ = 0;
};

/// Wraps any deterministic text -> vector function.
template <typename Fn>
class FunctionProvider final : public EmbeddingProvider {
 public:
  FunctionProvider(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  ProviderKind kind() const override { return ProviderKind::custom; }
  std::size_t dim() override { return dim_; }

 protected:
  std::vector<EmbeddingVector> compute(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.emplace_back(fn_(t));
    return out;
  }

 private:
  std::size_t dim_;
  Fn fn_;
};

template <typename Fn>
ProviderPtr make_function_provider(std::size_t dim, Fn fn) {
  return std::make_shared<FunctionProvider<Fn>>(dim, std::move(fn));
}

}  // namespace mstyle
