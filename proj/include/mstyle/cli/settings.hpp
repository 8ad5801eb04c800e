#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"

namespace mstyle::cli {

/// Resolved options of one subcommand: defaults, overlaid by the config
/// file, overlaid by flags given on the command line. Keys are flag names
/// with dashes turned into underscores.
class Settings {
 public:
  Settings() = default;
  explicit Settings(Json j) : j_(std::move(j)) {}

  /// Top-level scalars of `config` plus the keys of each named section, in
  /// order, are copied over the current values.
  void overlay_config(const Json& config, const std::vector<std::string>& sections) {
    require(config.is_object(), Errc::validation, "config must be a JSON object");
    for (const auto& [k, v] : config.items())
      if (!v.is_object()) j_[k] = v;
    if (config.contains("provider") && config.at("provider").is_object())
      j_["provider"] = config.at("provider");
    for (const auto& name : sections)
      if (config.contains(name)) {
        const auto& sec = config.at(name);
        require(sec.is_object(), Errc::validation, "config section \"" + name + "\" must be an object");
        for (const auto& [k, v] : sec.items()) j_[k] = v;
      }
  }

  void set(const std::string& key, Json value) { j_[key] = std::move(value); }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const Json& json() const { return j_; }

  std::string str(const std::string& key) const {
    require(has(key), Errc::validation, "missing required option --" + flag(key));
    return get<std::string>(key);
  }
  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get<std::string>(key) : fallback;
  }

  template <typename T>
  T get(const std::string& key) const {
    try {
      return j_.at(key).get<T>();
    } catch (const Json::exception&) {
      fail(Errc::validation, "option --" + flag(key) + " has the wrong type: " + j_.at(key).dump());
    }
  }
  template <typename T>
  T get_or(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  std::vector<std::string> list(const std::string& key) const {
    if (!has(key)) return {};
    if (j_.at(key).is_string()) return {j_.at(key).get<std::string>()};
    return get<std::vector<std::string>>(key);
  }

  /// Fails with an I/O error unless the file named by `key` exists.
  std::filesystem::path input(const std::string& key) const {
    const std::filesystem::path p = str(key);
    require(std::filesystem::is_regular_file(p), Errc::io,
            "--" + flag(key) + ": no such file " + p.string());
    return p;
  }

  static std::string flag(std::string key) {
    for (char& c : key)
      if (c == '_') c = '-';
    return key;
  }

 private:
  Json j_ = Json::object();
};

}  // namespace mstyle::cli
