#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/language.hpp"

namespace mstyle {

struct StyleFeature {
  std::string id;
  std::string name;
  std::string definition;
  std::string positive_label;
  std::string negative_label;
  std::set<LanguageCode> excluded_languages;

  bool applies_to(const LanguageCode& lang) const {
    return excluded_languages.count(lang) == 0;
  }

  bool operator==(const StyleFeature&) const = default;
};

inline void to_json(Json& j, const StyleFeature& f) {
  Json excluded = Json::array();
  for (const auto& l : f.excluded_languages) excluded.push_back(l.str());
  j = Json{{"id", f.id},
           {"name", f.name},
           {"definition", f.definition},
           {"positive_label", f.positive_label},
           {"negative_label", f.negative_label},
           {"excluded_languages", std::move(excluded)}};
}

/// Immutable-after-load collection of style features in file order.
class FeatureRegistry {
 public:
  FeatureRegistry() = default;

  /// Builds a registry, rejecting duplicate ids and unregistered exclusions.
  FeatureRegistry(std::vector<StyleFeature> features,
                  const LanguageRegistry& languages)
      : features_(std::move(features)) {
    for (std::size_t i = 0; i < features_.size(); ++i) {
      const auto& f = features_[i];
      if (f.id.empty()) fail(Errc::validation, "feature with empty id");
      if (!index_.emplace(f.id, i).second)
        fail(Errc::validation, "duplicate feature id \"" + f.id + "\"");
      for (const auto& l : f.excluded_languages) {
        if (!languages.contains(l))
          fail(Errc::validation, "feature \"" + f.id +
                                     "\" excludes unregistered language \"" +
                                     l.str() + "\"");
      }
    }
  }

  static FeatureRegistry from_json(const Json& j,
                                   const LanguageRegistry& languages) {
    if (!j.is_array())
      fail(Errc::parse, "feature registry must be a JSON array of objects");
    std::vector<StyleFeature> features;
    features.reserve(j.size());
    std::size_t index = 0;
    for (const auto& item : j) {
      try {
        StyleFeature f;
        f.id = field<std::string>(item, "id");
        f.name = field<std::string>(item, "name");
        f.definition = field<std::string>(item, "definition");
        f.positive_label = field<std::string>(item, "positive_label");
        f.negative_label = field<std::string>(item, "negative_label");
        for (const auto& l :
             field<std::vector<std::string>>(item, "excluded_languages"))
          f.excluded_languages.insert(LanguageCode(l));
        features.push_back(std::move(f));
      } catch (const Error& e) {
        throw Error(e.code(), "feature #" + std::to_string(index) + ": " + e.what());
      }
      ++index;
    }
    return FeatureRegistry(std::move(features), languages);
  }

  static FeatureRegistry load(const std::filesystem::path& path,
                              const LanguageRegistry& languages) {
    return from_json(io::read_json(path), languages);
  }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& f : features_) arr.push_back(f);
    return arr;
  }

  void save(const std::filesystem::path& path) const {
    io::write_json(path, to_json());
  }

  const std::vector<StyleFeature>& features() const noexcept { return features_; }
  std::size_t size() const noexcept { return features_.size(); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  const StyleFeature& get(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end())
      fail(Errc::lookup, "unknown style feature \"" + id + "\"");
    return features_[it->second];
  }

  bool operator==(const FeatureRegistry& other) const {
    return features_ == other.features_;
  }

 private:
  std::vector<StyleFeature> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Features usable for `language`, in registry order.
inline std::vector<StyleFeature> applicable_features(
    const FeatureRegistry& registry, const LanguageRegistry& languages,
    const LanguageCode& language) {
  languages.check(language);
  std::vector<StyleFeature> out;
  for (const auto& f : registry.features())
    if (f.applies_to(language)) out.push_back(f);
  return out;
}

}  // namespace mstyle
