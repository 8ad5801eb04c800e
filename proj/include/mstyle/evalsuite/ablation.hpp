#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/feature_registry.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/parallel_pair.hpp"

namespace mstyle::evalsuite {

enum class AblationName { in_domain, out_of_domain, out_of_distribution, no_language_overlap };

inline std::string to_string(AblationName n) {
  switch (n) {
    case AblationName::in_domain: return "in_domain";
    case AblationName::out_of_domain: return "out_of_domain";
    case AblationName::out_of_distribution: return "out_of_distribution";
    case AblationName::no_language_overlap: return "no_language_overlap";
  }
  return "in_domain";
}

inline AblationName parse_ablation_name(const std::string& s) {
  if (s == "in_domain") return AblationName::in_domain;
  if (s == "out_of_domain") return AblationName::out_of_domain;
  if (s == "out_of_distribution") return AblationName::out_of_distribution;
  if (s == "no_language_overlap") return AblationName::no_language_overlap;
  fail(Errc::validation, "unknown ablation condition \"" + s +
                             "\"; expected in_domain, out_of_domain, out_of_distribution or "
                             "no_language_overlap");
}

struct AblationCondition {
  AblationName name = AblationName::in_domain;
  std::set<std::string> excluded_features;
  std::set<LanguageCode> excluded_languages;

  void validate() const {
    if (name == AblationName::in_domain)
      require(excluded_features.empty() && excluded_languages.empty(), Errc::validation,
              "in_domain condition must not exclude anything");
  }

  bool operator==(const AblationCondition&) const = default;
};

inline void to_json(Json& j, const AblationCondition& c) {
  Json langs = Json::array();
  for (const auto& l : c.excluded_languages) langs.push_back(l.str());
  j = Json{{"name", to_string(c.name)},
           {"excluded_features", c.excluded_features},
           {"excluded_languages", std::move(langs)}};
}

inline AblationCondition condition_from_json(const Json& j) {
  AblationCondition c;
  c.name = parse_ablation_name(field<std::string>(j, "name"));
  if (j.contains("excluded_features"))
    for (auto& f : field<std::vector<std::string>>(j, "excluded_features"))
      c.excluded_features.insert(std::move(f));
  if (j.contains("excluded_languages"))
    for (const auto& l : field<std::vector<std::string>>(j, "excluded_languages"))
      c.excluded_languages.insert(LanguageCode(l));
  c.validate();
  return c;
}

inline AblationCondition load_condition(const std::filesystem::path& path) {
  try {
    return condition_from_json(io::read_json(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

/// Checks the ids against the registries, and that out_of_distribution
/// excludes at least what out_of_domain does when both are present.
inline void validate_condition_set(const std::vector<AblationCondition>& conditions,
                                   const FeatureRegistry& features,
                                   const LanguageRegistry& languages) {
  const AblationCondition* ood = nullptr;
  const AblationCondition* odist = nullptr;
  for (const auto& c : conditions) {
    c.validate();
    for (const auto& f : c.excluded_features)
      require(features.contains(f), Errc::validation,
              to_string(c.name) + ": unknown feature \"" + f + "\"");
    for (const auto& l : c.excluded_languages)
      require(languages.contains(l), Errc::validation,
              to_string(c.name) + ": unknown language \"" + l.str() + "\"");
    if (c.name == AblationName::out_of_domain) ood = &c;
    if (c.name == AblationName::out_of_distribution) odist = &c;
  }
  if (ood && odist)
    for (const auto& f : ood->excluded_features)
      require(odist->excluded_features.count(f) != 0, Errc::validation,
              "out_of_distribution must also exclude \"" + f + "\" (excluded by out_of_domain)");
}

struct RemovalReport {
  std::map<std::string, std::size_t> by_feature;     // every input feature, zeros included
  std::map<LanguageCode, std::size_t> by_language;   // every input language, zeros included
  std::size_t kept = 0;
  std::size_t removed = 0;
  std::vector<std::string> warnings;
};

inline Json to_json(const RemovalReport& r) {
  Json langs = Json::object();
  for (const auto& [l, n] : r.by_language) langs[l.str()] = n;
  return Json{{"kept", r.kept},
              {"removed", r.removed},
              {"removed_by_feature", r.by_feature},
              {"removed_by_language", std::move(langs)},
              {"warnings", r.warnings}};
}

struct AblationOutcome {
  std::vector<ParallelPair> pairs;
  RemovalReport report;
};

/// Drops pairs whose feature or language the condition excludes. Input
/// order is kept.
inline AblationOutcome apply_ablation(const std::vector<ParallelPair>& pairs,
                                      const AblationCondition& condition,
                                      const FeatureRegistry& features,
                                      const LanguageRegistry& languages) {
  validate_condition_set({condition}, features, languages);
  AblationOutcome out;
  for (const auto& p : pairs) {
    auto& nf = out.report.by_feature[p.feature];
    auto& nl = out.report.by_language[p.language];
    if (condition.excluded_features.count(p.feature) ||
        condition.excluded_languages.count(p.language)) {
      ++nf;
      ++nl;
      ++out.report.removed;
    } else {
      out.pairs.push_back(p);
    }
  }
  out.report.kept = out.pairs.size();
  if (!pairs.empty() && out.pairs.empty())
    out.report.warnings.push_back("condition " + to_string(condition.name) +
                                  " removed every pair; the training set is empty");
  return out;
}

/// Share of the full model's gain over the base model that the ablated
/// model keeps. Not clamped.
inline double retention(double base_score, double full_score, double ablated_score) {
  require(std::isfinite(base_score) && std::isfinite(full_score) && std::isfinite(ablated_score),
          Errc::numeric, "retention: non-finite score");
  if (full_score == base_score)
    fail(Errc::undefined_retention,
         "retention undefined: full score equals base score (" + std::to_string(base_score) + ")");
  return (ablated_score - base_score) / (full_score - base_score);
}

}  // namespace mstyle::evalsuite
