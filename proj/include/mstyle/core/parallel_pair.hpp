#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/feature_registry.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/language.hpp"

namespace mstyle {

enum class GenerationMethod { direct, translated, ground_truth };

inline std::string to_string(GenerationMethod m) {
  switch (m) {
    case GenerationMethod::direct: return "direct";
    case GenerationMethod::translated: return "translated";
    case GenerationMethod::ground_truth: return "ground_truth";
  }
  return "direct";
}

inline GenerationMethod parse_method(const std::string& s) {
  if (s == "direct") return GenerationMethod::direct;
  if (s == "translated") return GenerationMethod::translated;
  if (s == "ground_truth") return GenerationMethod::ground_truth;
  fail(Errc::validation, "unknown generation method \"" + s +
                             "\" (expected direct, translated or ground_truth)");
}

/// One pos/neg paraphrase pair for a (language, feature). pos_text carries the
/// feature, neg_text does not.
struct ParallelPair {
  std::string pair_id;
  LanguageCode language;
  std::string feature;
  std::string pos_text;
  std::string neg_text;
  std::string topic;
  GenerationMethod method = GenerationMethod::direct;
  std::string source;

  bool operator==(const ParallelPair&) const = default;
};

inline void to_json(Json& j, const ParallelPair& p) {
  j = Json{{"pair_id", p.pair_id},     {"language", p.language.str()},
           {"feature", p.feature},     {"pos_text", p.pos_text},
           {"neg_text", p.neg_text},   {"topic", p.topic},
           {"method", to_string(p.method)}, {"source", p.source}};
}

inline ParallelPair pair_from_json(const Json& j) {
  ParallelPair p;
  p.pair_id = field<std::string>(j, "pair_id");
  p.language = LanguageCode(field<std::string>(j, "language"));
  p.feature = field<std::string>(j, "feature");
  p.pos_text = field<std::string>(j, "pos_text");
  p.neg_text = field<std::string>(j, "neg_text");
  p.topic = j.contains("topic") ? field<std::string>(j, "topic") : std::string();
  p.method = j.contains("method") ? parse_method(field<std::string>(j, "method"))
                                  : GenerationMethod::ground_truth;
  p.source = j.contains("source") ? field<std::string>(j, "source") : std::string();
  return p;
}

/// Checks the pair invariants: distinct texts and an applicable feature.
inline void validate_pair(const ParallelPair& p, const FeatureRegistry& features,
                          const LanguageRegistry& languages) {
  if (p.pair_id.empty()) fail(Errc::validation, "pair with empty pair_id");
  languages.check(p.language);
  const auto& f = features.get(p.feature);
  if (!f.applies_to(p.language))
    fail(Errc::validation, "pair " + p.pair_id + ": feature \"" + p.feature +
                               "\" is excluded for language " + p.language.str());
  if (p.pos_text == p.neg_text)
    fail(Errc::validation, "pair " + p.pair_id + ": pos_text equals neg_text");
}

inline void validate_pairs(const std::vector<ParallelPair>& pairs,
                           const FeatureRegistry& features,
                           const LanguageRegistry& languages) {
  std::set<std::string> ids;
  for (const auto& p : pairs) {
    validate_pair(p, features, languages);
    if (!ids.insert(p.pair_id).second)
      fail(Errc::validation, "duplicate pair_id \"" + p.pair_id + "\"");
  }
}

inline std::vector<ParallelPair> read_pairs(const std::filesystem::path& path) {
  return io::read_jsonl<ParallelPair>(path, pair_from_json);
}

inline std::string pairs_to_jsonl(const std::vector<ParallelPair>& pairs) {
  return io::to_jsonl(pairs, [](const ParallelPair& p) { return Json(p); });
}

inline void write_pairs(const std::filesystem::path& path,
                        const std::vector<ParallelPair>& pairs) {
  io::write_file(path, pairs_to_jsonl(pairs));
}

/// Pairs grouped by feature then language, preserving input order.
using PairIndex =
    std::map<std::string, std::map<LanguageCode, std::vector<const ParallelPair*>>>;

inline PairIndex index_pairs(const std::vector<ParallelPair>& pairs) {
  PairIndex idx;
  for (const auto& p : pairs) idx[p.feature][p.language].push_back(&p);
  return idx;
}

}  // namespace mstyle
