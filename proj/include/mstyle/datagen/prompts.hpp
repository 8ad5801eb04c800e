#pragma once

#include <optional>
#include <string>
#include <utility>

#include "mstyle/core/error.hpp"
#include "mstyle/core/feature_registry.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/text.hpp"

namespace mstyle::datagen {

struct PromptAttributes {
  std::string topic;
  std::string sentence_length;
  std::string point_of_view;
  std::string tense;
  std::string sentence_type;
  std::string special_conditions;  // may be empty

  void validate() const {
    auto need = [](const std::string& v, const char* name) {
      require(!text::trim(v).empty(), Errc::validation,
              std::string("prompt attribute \"") + name + "\" is empty");
    };
    need(topic, "topic");
    need(sentence_length, "sentence_length");
    need(point_of_view, "point_of_view");
    need(tense, "tense");
    need(sentence_type, "sentence_type");
  }
};

/// Sampling settings for topic extraction and pair generation differ; both
/// are kept as request defaults.
struct SamplingParams {
  double temperature = 1.0;
  double top_p = 1.0;

  void validate() const {
    require(temperature >= 0.0 && temperature <= 2.0, Errc::validation,
            "temperature must lie in [0, 2]");
    require(top_p >= 0.0 && top_p <= 1.0, Errc::validation, "top_p must lie in [0, 1]");
  }
};

inline constexpr SamplingParams kTopicSampling{1.0, 0.0};
inline constexpr SamplingParams kPairSampling{1.0, 1.0};

struct GenerationRequest {
  LanguageCode language;
  std::string feature;
  PromptAttributes attributes;
  SamplingParams sampling = kPairSampling;
};

inline std::string render_topic_prompt(const std::string& sentence) {
  require(!text::trim(sentence).empty(), Errc::precondition,
          "render_topic_prompt: empty sentence");
  // Plain concatenation: braces inside the sentence are never re-expanded.
  return "What is the fine-grained topic of the following text:\n" + sentence +
         " Only return the topic.";
}

/// The phrase after "with and without": the positive label minus a leading
/// "With ", falling back to the lowercased feature name.
inline std::string feature_phrase(const StyleFeature& f) {
  constexpr std::string_view with = "With ";
  if (text::starts_with_icase(f.positive_label, with) &&
      f.positive_label.size() > with.size())
    return f.positive_label.substr(with.size());
  return text::lower(f.name);
}

inline std::string render_pair_prompt(const GenerationRequest& req,
                                      const FeatureRegistry& features,
                                      const LanguageRegistry& languages) {
  const std::string& lang = languages.name(req.language);
  const StyleFeature& f = features.get(req.feature);
  if (!f.applies_to(req.language))
    fail(Errc::validation, "feature \"" + f.id + "\" is not applicable to language " +
                               req.language.str());
  req.attributes.validate();
  req.sampling.validate();

  const auto& a = req.attributes;
  std::string p;
  p += "Generate a pair of " + lang + " sentences with and without " +
       feature_phrase(f) + " with the following attributes:\n";
  p += " 1. Topic: " + a.topic + "\n";
  p += " 2. Length: " + a.sentence_length + "\n";
  p += " 3. Point of view: " + a.point_of_view + "\n";
  p += " 4. Tense: " + a.tense + "\n";
  p += " 5. Type of Sentence: " + a.sentence_type + "\n";
  p += "\n";
  p += "Ensure that the generated sentences meet the following conditions:\n";
  p += " 1. There is no extra information in one sentence that is not in the other.\n";
  p += " 2. The difference between the two sentences is subtle.\n";
  p += " 3. The two sentences have the same length.\n";
  if (!text::trim(a.special_conditions).empty()) p += " " + a.special_conditions + "\n";
  p += "\n";
  p += "Use Format:\n";
  p += " " + f.positive_label + ": [sentence in " + lang + "]\n";
  p += " " + f.negative_label + ": [sentence in " + lang + "]\n";
  p += "\n";
  p += "Your response should only consist of the two sentences, without quotation marks.";
  return p;
}

/// Removes matching ASCII or typographic quotation marks around a sentence.
inline std::string strip_quotes(std::string_view s) {
  static constexpr std::pair<std::string_view, std::string_view> quotes[] = {
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"},
      {"«", "»"}, {"「", "」"}, {"『", "』"},
      {"„", "“"},
  };
  s = text::trim(s);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [open, close] : quotes) {
      if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
          s.substr(s.size() - close.size()) == close) {
        s = text::trim(s.substr(open.size(), s.size() - open.size() - close.size()));
        changed = true;
      }
    }
  }
  return std::string(s);
}

/// Extracts (pos_text, neg_text) from a model completion. Label lines may come
/// in either order; each must appear exactly once.
inline std::pair<std::string, std::string> parse_pair_completion(
    const std::string& completion, const StyleFeature& feature) {
  const std::string pos_prefix = feature.positive_label + ":";
  const std::string neg_prefix = feature.negative_label + ":";
  // Longer prefix first so "With X:" never shadows "Without X:".
  const bool pos_first = pos_prefix.size() >= neg_prefix.size();

  std::optional<std::string> pos, neg;
  std::size_t pos_count = 0, neg_count = 0;
  std::size_t start = 0;
  while (start <= completion.size()) {
    auto nl = completion.find('\n', start);
    if (nl == std::string::npos) nl = completion.size();
    std::string_view line = text::trim(std::string_view(completion).substr(start, nl - start));
    start = nl + 1;
    auto match = [&](const std::string& prefix) {
      return text::starts_with_icase(line, prefix);
    };
    auto take = [&](const std::string& prefix) { return strip_quotes(line.substr(prefix.size())); };
    const std::string* first = pos_first ? &pos_prefix : &neg_prefix;
    const std::string* second = pos_first ? &neg_prefix : &pos_prefix;
    for (const std::string* prefix : {first, second}) {
      if (!match(*prefix)) continue;
      if (prefix == &pos_prefix) {
        ++pos_count;
        pos = take(*prefix);
      } else {
        ++neg_count;
        neg = take(*prefix);
      }
      break;
    }
    if (nl == completion.size()) break;
  }
  if (pos_count != 1 || neg_count != 1)
    throw ParseFailure("completion must contain exactly one \"" + pos_prefix +
                           "\" line and one \"" + neg_prefix + "\" line (found " +
                           std::to_string(pos_count) + " and " +
                           std::to_string(neg_count) + ")",
                       completion);
  if (pos->empty() || neg->empty())
    throw ParseFailure("completion has an empty sentence", completion);
  return {std::move(*pos), std::move(*neg)};
}

}  // namespace mstyle::datagen
