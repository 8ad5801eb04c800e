#pragma once

#include <map>
#include <string>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/text.hpp"
#include "mstyle/embed/http_provider.hpp"
#include "mstyle/embed/provider.hpp"
#include "mstyle/trainer/projection.hpp"

namespace mstyle::cli {

/// "kind:key=value,key=value" -> {"kind": kind, key: value, ...}. Values stay
/// strings; make_provider converts them. Keys prefixed "base_" describe the
/// base provider of a trained_model and are nested under "base".
inline Json parse_provider_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind(text::trim(spec.substr(0, colon)));
  require(!kind.empty(), Errc::validation, "empty provider spec");
  Json j{{"kind", kind}};
  if (colon == std::string::npos) return j;
  const std::string rest = spec.substr(colon + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    auto comma = rest.find(',', start);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item(text::trim(std::string_view(rest).substr(start, comma - start)));
    start = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    require(eq != std::string::npos && eq > 0, Errc::validation,
            "provider spec item \"" + item + "\" is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key.rfind("base_", 0) == 0) {
      if (!j.contains("base")) j["base"] = Json::object();
      j["base"][key == "base_kind" ? "kind" : key.substr(5)] = value;
    } else {
      j[key] = value;
    }
  }
  return j;
}

namespace detail {

inline std::string spec_string(const Json& j, const char* key, const std::string& fallback = {}) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

inline std::size_t spec_size(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  const std::string s = spec_string(j, key);
  std::size_t used = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), Errc::validation,
          std::string("provider parameter ") + key + " must be a non-negative integer, got \"" +
              s + "\"");
  return static_cast<std::size_t>(n);
}

}  // namespace detail

/// Builds a provider from a spec object (or a spec string, which is parsed
/// first).
inline ProviderPtr make_provider(const Json& spec_in) {
  const Json spec = spec_in.is_string() ? parse_provider_spec(spec_in.get<std::string>()) : spec_in;
  require(spec.is_object(), Errc::validation, "provider spec must be a string or an object");
  const std::string kind = detail::spec_string(spec, "kind");
  if (kind == "hashed_ngram") {
    NgramRange range;
    range.min_n = detail::spec_size(spec, "min_n", range.min_n);
    range.max_n = detail::spec_size(spec, "max_n", range.max_n);
    return std::make_shared<HashedNgramProvider>(detail::spec_size(spec, "dim", 256), range);
  }
  if (kind == "vector_file") {
    const std::string path = detail::spec_string(spec, "path");
    require(!path.empty(), Errc::validation, "vector_file provider needs path=");
    return std::make_shared<VectorFileProvider>(path);
  }
  if (kind == "http_service") {
    HttpEmbeddingProvider::Options o;
    o.base_url = detail::spec_string(spec, "url");
    o.dim = detail::spec_size(spec, "dim", 0);
    o.retries = static_cast<int>(detail::spec_size(spec, "retries", 2));
    o.timeout_seconds = static_cast<int>(detail::spec_size(spec, "timeout", 30));
    o.max_batch = detail::spec_size(spec, "max_batch", 256);
    return std::make_shared<HttpEmbeddingProvider>(o);
  }
  if (kind == "trained_model") {
    const std::string model = detail::spec_string(spec, "model");
    require(!model.empty(), Errc::validation, "trained_model provider needs model=");
    require(spec.contains("base"), Errc::validation,
            "trained_model provider needs base_kind= and its base_* parameters");
    return trainer::trained_model_provider(trainer::load_model(model), make_provider(spec.at("base")));
  }
  fail(Errc::validation, "unknown provider kind \"" + kind +
                             "\"; expected hashed_ngram, vector_file, http_service or "
                             "trained_model");
}

}  // namespace mstyle::cli
