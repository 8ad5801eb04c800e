#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"

namespace mstyle {

/// Two-letter lowercase ISO-639-1 code.
class LanguageCode {
 public:
  LanguageCode() = default;
  explicit LanguageCode(std::string_view code) : code_(code) {
    if (!is_well_formed(code))
      fail(Errc::validation, "invalid language code \"" + std::string(code) +
                                 "\" (expected two lowercase ASCII letters)");
  }

  static bool is_well_formed(std::string_view code) noexcept {
    return code.size() == 2 && code[0] >= 'a' && code[0] <= 'z' &&
           code[1] >= 'a' && code[1] <= 'z';
  }

  const std::string& str() const noexcept { return code_; }
  bool empty() const noexcept { return code_.empty(); }

  auto operator<=>(const LanguageCode&) const = default;

 private:
  std::string code_;
};

inline void to_json(Json& j, const LanguageCode& l) { j = l.str(); }
inline void from_json(const Json& j, LanguageCode& l) {
  l = LanguageCode(j.get<std::string>());
}

/// The set of languages the pipeline accepts, with display names used in
/// prompts.
class LanguageRegistry {
 public:
  LanguageRegistry() = default;

  void add(LanguageCode code, std::string name) {
    names_[std::move(code)] = std::move(name);
  }

  bool contains(const LanguageCode& code) const {
    return names_.count(code) != 0;
  }

  void check(const LanguageCode& code) const {
    if (!contains(code))
      fail(Errc::lookup, "language \"" + code.str() + "\" is not registered");
  }

  /// Validates and registers-checks a raw string in one step.
  LanguageCode resolve(std::string_view raw) const {
    LanguageCode code(raw);
    check(code);
    return code;
  }

  const std::string& name(const LanguageCode& code) const {
    const auto it = names_.find(code);
    if (it == names_.end())
      fail(Errc::lookup, "language \"" + code.str() + "\" is not registered");
    return it->second;
  }

  std::vector<LanguageCode> codes() const {
    std::vector<LanguageCode> out;
    for (const auto& [code, _] : names_) out.push_back(code);
    return out;
  }

  std::size_t size() const { return names_.size(); }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& [code, name] : names_)
      arr.push_back(Json{{"code", code.str()}, {"name", name}});
    return arr;
  }

  static LanguageRegistry from_json(const Json& j) {
    if (!j.is_array()) fail(Errc::parse, "language registry must be a JSON array");
    LanguageRegistry reg;
    for (const auto& item : j) {
      LanguageCode code(field<std::string>(item, "code"));
      if (reg.contains(code))
        fail(Errc::validation, "duplicate language code \"" + code.str() + "\"");
      reg.add(code, field<std::string>(item, "name"));
    }
    return reg;
  }

  static LanguageRegistry load(const std::filesystem::path& path) {
    return from_json(io::read_json(path));
  }

  /// Training languages, the multilingual benchmark languages, and the
  /// authorship-verification languages.
  static LanguageRegistry defaults() {
    static const std::pair<const char*, const char*> table[] = {
        {"am", "Amharic"},   {"ar", "Arabic"},    {"bn", "Bengali"},
        {"de", "German"},    {"el", "Greek"},     {"en", "English"},
        {"es", "Spanish"},   {"fr", "French"},    {"hi", "Hindi"},
        {"it", "Italian"},   {"ja", "Japanese"},  {"ko", "Korean"},
        {"ml", "Malayalam"}, {"mr", "Marathi"},   {"nl", "Dutch"},
        {"or", "Odia"},      {"pa", "Punjabi"},   {"pt", "Portuguese"},
        {"ru", "Russian"},   {"sl", "Slovenian"}, {"te", "Telugu"},
        {"uk", "Ukrainian"}, {"ur", "Urdu"},      {"zh", "Chinese"},
    };
    LanguageRegistry reg;
    for (const auto& [code, name] : table) reg.add(LanguageCode(code), name);
    return reg;
  }

 private:
  std::map<LanguageCode, std::string> names_;
};

}  // namespace mstyle
