#pragma once

#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/feature_registry.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/datagen/clients.hpp"
#include "mstyle/datagen/prompts.hpp"

namespace mstyle::datagen {

/// Value pools the prompt attributes are drawn from. Special conditions are
/// per feature id.
struct AttributePools {
  std::vector<std::string> sentence_lengths{"short (5-10 words)", "medium (10-20 words)",
                                            "long (20-30 words)"};
  std::vector<std::string> points_of_view{"first person", "second person", "third person"};
  std::vector<std::string> tenses{"past", "present", "future"};
  std::vector<std::string> sentence_types{"declarative", "interrogative", "exclamatory",
                                          "imperative"};
  std::map<std::string, std::string> special_conditions;

  void validate() const {
    require(!sentence_lengths.empty() && !points_of_view.empty() && !tenses.empty() &&
                !sentence_types.empty(),
            Errc::validation, "attribute pools must all be non-empty");
  }

  static AttributePools from_json(const Json& j) {
    AttributePools p;
    auto list = [&](const char* key, std::vector<std::string>& dst) {
      if (j.contains(key)) dst = field<std::vector<std::string>>(j, key);
    };
    list("sentence_lengths", p.sentence_lengths);
    list("points_of_view", p.points_of_view);
    list("tenses", p.tenses);
    list("sentence_types", p.sentence_types);
    if (j.contains("special_conditions"))
      p.special_conditions = field<std::map<std::string, std::string>>(j, "special_conditions");
    p.validate();
    return p;
  }
};

inline std::vector<std::string> read_topics(const std::filesystem::path& path) {
  const std::string content = io::read_file(path);
  std::vector<std::string> topics;
  std::size_t start = 0;
  while (start < content.size()) {
    auto nl = content.find('\n', start);
    if (nl == std::string::npos) nl = content.size();
    const auto line = text::trim(std::string_view(content).substr(start, nl - start));
    if (!line.empty()) topics.emplace_back(line);
    start = nl + 1;
  }
  return topics;
}

struct GenerateOptions {
  int max_attempts = 3;
  int parallelism = 1;
  SamplingParams sampling = kPairSampling;
};

struct SkipRecord {
  std::size_t index = 0;
  std::string topic;
  int attempts = 0;
  std::string reason;
  std::string raw_completion;
};

struct GenerationResult {
  std::vector<ParallelPair> pairs;
  std::vector<SkipRecord> skipped;
};

inline Json to_json(const SkipRecord& s) {
  return Json{{"index", s.index},
              {"topic", s.topic},
              {"attempts", s.attempts},
              {"reason", s.reason},
              {"raw_completion", s.raw_completion}};
}

namespace detail {

struct Outcome {
  std::optional<std::pair<std::string, std::string>> texts;
  SkipRecord skip;
};

inline Outcome run_request(TextGenClient& client, const std::string& prompt,
                           const StyleFeature& feature, const GenerateOptions& opts,
                           std::size_t index, const std::string& topic) {
  Outcome out;
  out.skip.index = index;
  out.skip.topic = topic;
  for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    std::string completion;
    try {
      completion = client.complete(prompt, opts.sampling.temperature, opts.sampling.top_p);
    } catch (const std::exception& e) {
      fail(Errc::transport, "generation request " + std::to_string(index) + " failed on attempt " +
                                std::to_string(attempt) + ": " + e.what());
    }
    out.skip.attempts = attempt;
    try {
      auto texts = parse_pair_completion(completion, feature);
      if (texts.first == texts.second) {
        out.skip.reason = "pos_text equals neg_text";
        out.skip.raw_completion = completion;
        continue;
      }
      out.texts = std::move(texts);
      return out;
    } catch (const ParseFailure& e) {
      out.skip.reason = e.what();
      out.skip.raw_completion = e.raw();
    }
  }
  return out;
}

}  // namespace detail

/// Directly generates `count` pairs for one (language, feature). Topics are
/// drawn without replacement; every draw happens up front on the caller's
/// Rng, so the result does not depend on `parallelism`.
inline GenerationResult generate_pairs(TextGenClient& client, const FeatureRegistry& features,
                                       const LanguageRegistry& languages,
                                       const LanguageCode& language, const std::string& feature_id,
                                       std::size_t count, const std::vector<std::string>& topics,
                                       const AttributePools& pools, Rng& rng,
                                       const GenerateOptions& opts = {}) {
  languages.check(language);
  const StyleFeature& feature = features.get(feature_id);
  require(feature.applies_to(language), Errc::validation,
          "feature \"" + feature_id + "\" is not applicable to language " + language.str());
  require(count <= topics.size(), Errc::precondition,
          "requested " + std::to_string(count) + " pairs but only " +
              std::to_string(topics.size()) + " topics are available");
  require(opts.max_attempts >= 1, Errc::validation, "max_attempts must be >= 1");
  pools.validate();

  const auto topic_idx = rng.sample_indices(topics.size(), count);
  std::vector<std::string> prompts;
  std::vector<std::string> chosen_topics;
  prompts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    GenerationRequest req;
    req.language = language;
    req.feature = feature_id;
    req.sampling = opts.sampling;
    auto& a = req.attributes;
    a.topic = topics[topic_idx[i]];
    a.sentence_length = pools.sentence_lengths[rng.uniform_index(pools.sentence_lengths.size())];
    a.point_of_view = pools.points_of_view[rng.uniform_index(pools.points_of_view.size())];
    a.tense = pools.tenses[rng.uniform_index(pools.tenses.size())];
    a.sentence_type = pools.sentence_types[rng.uniform_index(pools.sentence_types.size())];
    if (auto it = pools.special_conditions.find(feature_id); it != pools.special_conditions.end())
      a.special_conditions = it->second;
    prompts.push_back(render_pair_prompt(req, features, languages));
    chosen_topics.push_back(a.topic);
  }

  std::vector<detail::Outcome> outcomes(count);
  const std::size_t width = static_cast<std::size_t>(std::max(1, opts.parallelism));
  for (std::size_t begin = 0; begin < count; begin += width) {
    const std::size_t end = std::min(count, begin + width);
    if (width == 1) {
      outcomes[begin] = detail::run_request(client, prompts[begin], feature, opts, begin,
                                            chosen_topics[begin]);
      continue;
    }
    std::vector<std::future<detail::Outcome>> futures;
    for (std::size_t i = begin; i < end; ++i)
      futures.push_back(std::async(std::launch::async, [&, i] {
        return detail::run_request(client, prompts[i], feature, opts, i, chosen_topics[i]);
      }));
    for (std::size_t i = begin; i < end; ++i) outcomes[i] = futures[i - begin].get();
  }

  GenerationResult result;
  for (std::size_t i = 0; i < count; ++i) {
    auto& o = outcomes[i];
    if (!o.texts) {
      result.skipped.push_back(std::move(o.skip));
      continue;
    }
    char id[32];
    std::snprintf(id, sizeof id, "%04zu", i);
    ParallelPair p;
    p.pair_id = language.str() + "-" + feature_id + "-direct-" + id;
    p.language = language;
    p.feature = feature_id;
    p.pos_text = std::move(o.texts->first);
    p.neg_text = std::move(o.texts->second);
    p.topic = chosen_topics[i];
    p.method = GenerationMethod::direct;
    p.source = "generator:" + client.name();
    result.pairs.push_back(std::move(p));
  }
  return result;
}

struct TranslationFailure {
  std::string pair_id;
  std::string message;
};

struct TranslationResult {
  std::vector<ParallelPair> pairs;
  std::vector<TranslationFailure> failures;
};

/// Translates each side of every pair independently into `target`. Pairs
/// whose translation fails, or whose two sides collapse to the same text, are
/// reported in `failures` and left out of `pairs`.
inline TranslationResult translate_pairs(TranslateClient& client,
                                         const std::vector<ParallelPair>& pairs,
                                         const LanguageCode& target,
                                         const FeatureRegistry& features,
                                         const LanguageRegistry& languages) {
  TranslationResult result;
  if (pairs.empty()) return result;
  languages.check(target);
  const LanguageCode source = pairs.front().language;
  for (const auto& p : pairs) {
    require(p.language == source, Errc::validation,
            "translate_pairs: mixed source languages (" + source.str() + " and " +
                p.language.str() + ")");
    require(features.get(p.feature).applies_to(target), Errc::validation,
            "feature \"" + p.feature + "\" is not applicable to language " + target.str());
  }
  for (const auto& p : pairs) {
    try {
      ParallelPair out = p;
      out.pos_text = client.translate(p.pos_text, source, target);
      out.neg_text = client.translate(p.neg_text, source, target);
      out.language = target;
      out.method = GenerationMethod::translated;
      out.pair_id = p.pair_id + "-" + target.str();
      out.source = "translator:" + client.name();
      if (out.pos_text == out.neg_text) {
        result.failures.push_back({p.pair_id, "translation collapsed pos and neg to the same text"});
        continue;
      }
      result.pairs.push_back(std::move(out));
    } catch (const std::exception& e) {
      result.failures.push_back({p.pair_id, e.what()});
    }
  }
  return result;
}

}  // namespace mstyle::datagen
