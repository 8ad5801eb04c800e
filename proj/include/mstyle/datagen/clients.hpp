#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/core/text.hpp"

namespace mstyle::datagen {

/// A text-generation model. Implementations must be safe to call from several
/// threads at once.
class TextGenClient {
 public:
  virtual ~TextGenClient() = default;
  virtual std::string name() const = 0;
  virtual std::string complete(const std::string& prompt, double temperature, double top_p) = 0;
};

/// A machine-translation service.
class TranslateClient {
 public:
  virtual ~TranslateClient() = default;
  virtual std::string name() const = 0;
  virtual std::string translate(const std::string& text, const LanguageCode& source,
                                const LanguageCode& target) = 0;
};

/// Returns the same completion for every prompt.
class FixedCompletionClient final : public TextGenClient {
 public:
  explicit FixedCompletionClient(std::string completion) : completion_(std::move(completion)) {}
  std::string name() const override { return "stub-fixed"; }
  std::string complete(const std::string&, double, double) override { return completion_; }

 private:
  std::string completion_;
};

/// Offline stand-in for a generation model. Reads the two answer labels and
/// the topic back out of the prompt and answers with a well-formed pair whose
/// wording is a pure function of (seed, prompt).
class TemplateStubClient final : public TextGenClient {
 public:
  explicit TemplateStubClient(std::uint64_t seed) : seed_(seed) {}

  std::string name() const override { return "stub-template"; }

  std::string complete(const std::string& prompt, double, double) override {
    std::vector<std::string> labels;
    std::string topic = "something";
    bool in_format = false;
    std::size_t start = 0;
    while (start < prompt.size()) {
      auto nl = prompt.find('\n', start);
      if (nl == std::string::npos) nl = prompt.size();
      const std::string_view line = text::trim(std::string_view(prompt).substr(start, nl - start));
      start = nl + 1;
      if (line.rfind("1. Topic: ", 0) == 0) topic = std::string(line.substr(10));
      if (line == "Use Format:") {
        in_format = true;
        continue;
      }
      if (in_format) {
        const auto colon = line.find(": [");
        if (colon == std::string_view::npos) {
          in_format = false;
          continue;
        }
        labels.emplace_back(line.substr(0, colon));
      }
    }
    if (labels.size() != 2) return "I cannot help with that.";
    const std::uint64_t h = splitmix64(seed_ ^ text::fnv1a64(prompt));
    char tag[24];
    std::snprintf(tag, sizeof tag, "%08llx", static_cast<unsigned long long>(h >> 32));
    const std::string content = topic + " note " + tag;
    return labels[0] + ": " + content + ", marked.\n" + labels[1] + ": " + content + ".";
  }

 private:
  std::uint64_t seed_;
};

/// Returns the text unchanged.
class IdentityTranslateClient final : public TranslateClient {
 public:
  std::string name() const override { return "stub-identity"; }
  std::string translate(const std::string& text, const LanguageCode&, const LanguageCode&) override {
    return text;
  }
};

/// Prefixes the target language code, e.g. "[hi] ...".
class TaggingTranslateClient final : public TranslateClient {
 public:
  std::string name() const override { return "stub-tagging"; }
  std::string translate(const std::string& text, const LanguageCode&,
                        const LanguageCode& target) override {
    return "[" + target.str() + "] " + text;
  }
};

}  // namespace mstyle::datagen
