#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mstyle/benchmark/score.hpp"
#include "mstyle/benchmark/soc.hpp"
#include "mstyle/cli/provider_spec.hpp"
#include "mstyle/cli/settings.hpp"
#include "mstyle/core/feature_registry.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/datagen/clients.hpp"
#include "mstyle/datagen/generate.hpp"
#include "mstyle/evalsuite/ablation.hpp"
#include "mstyle/evalsuite/av.hpp"
#include "mstyle/quality/annotation.hpp"
#include "mstyle/quality/report.hpp"
#include "mstyle/quality/validation.hpp"
#include "mstyle/trainer/train.hpp"

namespace mstyle::cli {

struct CommandResult {
  Json report;
  std::string summary;
  int exit_code = 0;
};

inline std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline LanguageRegistry load_languages(const Settings& s) {
  return s.has("languages") ? LanguageRegistry::load(s.input("languages"))
                            : LanguageRegistry::defaults();
}

inline FeatureRegistry load_features(const Settings& s, const LanguageRegistry& langs) {
  return FeatureRegistry::load(s.input("features"), langs);
}

inline unsigned threads_of(const Settings& s) {
  return static_cast<unsigned>(std::max<std::size_t>(1, s.get_or<std::size_t>("threads", 1)));
}

// build-soc --------------------------------------------------------------

/// Multilingual mode needs a single language and builds one block per
/// feature; crosslingual mode builds one block per feature from the
/// index-aligned per-language corpora.
inline std::vector<benchmark::SocInstance> build_soc(const std::vector<ParallelPair>& pairs,
                                                     benchmark::SocKind mode,
                                                     const LanguageCode& anchor,
                                                     benchmark::Polarity polarity) {
  std::map<std::string, std::vector<ParallelPair>> by_feature;
  for (const auto& p : pairs) by_feature[p.feature].push_back(p);
  std::vector<benchmark::SocInstance> out;
  if (mode == benchmark::SocKind::multilingual) {
    for (const auto& p : pairs)
      require(p.language == pairs.front().language, Errc::validation,
              "multilingual mode needs pairs of one language; found " +
                  pairs.front().language.str() + " and " + p.language.str());
    for (auto& [_, group] : by_feature) {
      auto block = benchmark::build_multilingual_soc(std::move(group), polarity);
      out.insert(out.end(), std::make_move_iterator(block.begin()),
                 std::make_move_iterator(block.end()));
    }
  } else {
    for (const auto& [_, group] : by_feature) {
      auto block =
          benchmark::build_crosslingual_soc(benchmark::split_by_language(group), anchor, polarity);
      out.insert(out.end(), std::make_move_iterator(block.begin()),
                 std::make_move_iterator(block.end()));
    }
  }
  return out;
}

inline CommandResult cmd_build_soc(const Settings& s) {
  const auto pairs_path = s.input("pairs");
  const std::filesystem::path out_path = s.str("out");
  const auto mode = benchmark::parse_kind(s.str_or("mode", "multilingual"));
  const auto polarity = benchmark::parse_polarity(s.str_or("anchor_polarity", "pos"));
  LanguageCode anchor;
  if (mode == benchmark::SocKind::crosslingual) anchor = LanguageCode(s.str("anchor_language"));

  const auto pairs = read_pairs(pairs_path);
  require(!pairs.empty(), Errc::precondition, pairs_path.string() + " holds no pairs");
  const auto instances = build_soc(pairs, mode, anchor, polarity);
  benchmark::write_benchmark(out_path, instances);

  CommandResult r;
  r.report = Json{{"mode", benchmark::to_string(mode)},
                  {"anchor_language", anchor.empty() ? Json(nullptr) : Json(anchor.str())},
                  {"anchor_polarity", benchmark::to_string(polarity)},
                  {"pairs", pairs.size()},
                  {"instances", instances.size()},
                  {"out", out_path.string()}};
  r.summary = std::to_string(instances.size()) + " instances written";
  return r;
}

// score ------------------------------------------------------------------

inline CommandResult cmd_score(const Settings& s) {
  const auto bench_path = s.input("benchmark");
  const auto provider = make_provider(s.json().at("provider"));
  const auto tie = benchmark::parse_tie_policy(s.str_or("tie_policy", "strict_fail"));
  const auto instances = benchmark::read_benchmark(bench_path);
  const auto report = benchmark::score_soc(instances, *provider, tie, threads_of(s));
  CommandResult r;
  r.report = to_json(report);
  r.summary = "accuracy " + fixed4(report.accuracy);
  return r;
}

// train ------------------------------------------------------------------

inline trainer::TrainConfig train_config(const Settings& s) {
  return trainer::TrainConfig::from_json(s.json());
}

inline CommandResult cmd_train(const Settings& s) {
  const auto pairs_path = s.input("pairs");
  const std::filesystem::path model_out = s.str("model_out");
  const auto config = train_config(s);
  const auto langs = load_languages(s);
  const auto features = load_features(s, langs);
  const auto base = make_provider(s.json().at("provider"));

  const auto pairs = read_pairs(pairs_path);
  validate_pairs(pairs, features, langs);
  const auto result = trainer::train(pairs, *base, config);
  trainer::save_model(model_out, result.model);
  if (s.has("loss_out")) io::write_file(s.str("loss_out"), trainer::loss_trace_csv(result.epoch_loss));

  CommandResult r;
  r.report = Json{{"config", to_json(config)},
                  {"pairs", pairs.size()},
                  {"in_dim", result.model.in_dim},
                  {"out_dim", result.model.out_dim},
                  {"epoch_loss", result.epoch_loss},
                  {"model", model_out.string()}};
  r.summary = "trained " + std::to_string(config.epochs) + " epochs, final loss " +
              fixed4(result.epoch_loss.back());
  return r;
}

// ablate -----------------------------------------------------------------

/// Scores the base provider, a model trained on the full data and one
/// trained on the ablated data (same seed and config) on each benchmark.
inline CommandResult cmd_ablate(const Settings& s) {
  const auto pairs_path = s.input("pairs");
  const auto condition_path = s.input("condition");
  const auto bench_paths = s.list("benchmark");
  require(!bench_paths.empty(), Errc::validation, "ablate needs at least one --benchmark");
  for (const auto& b : bench_paths)
    require(std::filesystem::is_regular_file(b), Errc::io, "--benchmark: no such file " + b);
  const auto config = train_config(s);
  const auto langs = load_languages(s);
  const auto features = load_features(s, langs);
  const auto tie = benchmark::parse_tie_policy(s.str_or("tie_policy", "strict_fail"));
  const auto condition = evalsuite::load_condition(condition_path);
  const auto base = make_provider(s.json().at("provider"));

  const auto pairs = read_pairs(pairs_path);
  validate_pairs(pairs, features, langs);
  const auto ablated = evalsuite::apply_ablation(pairs, condition, features, langs);
  require(!ablated.pairs.empty(), Errc::precondition,
          "condition " + evalsuite::to_string(condition.name) + " leaves no training data");

  const auto full_model = trainer::train(pairs, *base, config).model;
  const auto ablated_model = trainer::train(ablated.pairs, *base, config).model;
  const auto full = trainer::trained_model_provider(full_model, base);
  const auto abl = trainer::trained_model_provider(ablated_model, base);

  Json rows = Json::array();
  std::size_t undefined = 0;
  for (const auto& path : bench_paths) {
    const auto instances = benchmark::read_benchmark(path);
    const double sb = benchmark::score_soc(instances, *base, tie, threads_of(s)).accuracy;
    const double sf = benchmark::score_soc(instances, *full, tie, threads_of(s)).accuracy;
    const double sa = benchmark::score_soc(instances, *abl, tie, threads_of(s)).accuracy;
    const std::string name = std::filesystem::path(path).filename().string();
    for (const auto& [cond, score] : {std::pair<std::string, double>{"base", sb},
                                      {"full", sf},
                                      {evalsuite::to_string(condition.name), sa}}) {
      Json row{{"benchmark", name}, {"condition", cond}, {"soc_accuracy", score}};
      try {
        row["retention"] = evalsuite::retention(sb, sf, score);
      } catch (const Error& e) {
        if (e.code() != Errc::undefined_retention) throw;
        row["retention"] = nullptr;
        row["retention_error"] = e.what();
        ++undefined;
      }
      rows.push_back(std::move(row));
    }
  }

  CommandResult r;
  r.report = Json{{"condition", Json(condition)},
                  {"removal", to_json(ablated.report)},
                  {"config", to_json(config)},
                  {"rows", std::move(rows)}};
  const auto& last = r.report["rows"].back();
  r.summary = evalsuite::to_string(condition.name) + ": " +
              std::to_string(ablated.report.removed) + " pairs removed, retention " +
              (last["retention"].is_null() ? std::string("undefined")
                                           : fixed4(last["retention"].get<double>()));
  if (undefined) r.summary += " (" + std::to_string(undefined) + " undefined)";
  return r;
}

// aggregate --------------------------------------------------------------

inline CommandResult cmd_aggregate(const Settings& s) {
  const auto pairs_path = s.input("pairs");
  const auto responses_path = s.input("responses");
  quality::QualityOptions opts;
  opts.min_annotators = s.get_or<std::size_t>("min_annotators", 3);
  opts.fluency_tie_threshold = s.get_or<double>("threshold", 0.02);
  ProviderPtr provider;
  if (s.has("provider")) provider = make_provider(s.json().at("provider"));

  const auto pairs = read_pairs(pairs_path);
  const auto responses = quality::read_responses(responses_path);
  const auto report = quality::aggregate_quality(pairs, responses, opts, provider.get());
  CommandResult r;
  r.report = to_json(report);
  r.report["min_annotators"] = opts.min_annotators;
  r.summary = std::to_string(report.rows.size()) + " groups, " +
              std::to_string(report.insufficient_tasks.size()) + " tasks with fewer than " +
              std::to_string(opts.min_annotators) + " annotators";
  return r;
}

// validate-dataset -------------------------------------------------------

inline CommandResult cmd_validate_dataset(const Settings& s) {
  const auto pairs_path = s.input("pairs");
  const auto langs = load_languages(s);
  const auto features = load_features(s, langs);
  const auto provider = make_provider(s.json().at("provider"));
  const auto pairs = read_pairs(pairs_path);
  require(!pairs.empty(), Errc::precondition, pairs_path.string() + " holds no pairs");

  Json errors = Json::array();
  std::set<std::string> ids;
  for (const auto& p : pairs) {
    try {
      validate_pair(p, features, langs);
      require(ids.insert(p.pair_id).second, Errc::validation,
              "duplicate pair_id \"" + p.pair_id + "\"");
    } catch (const Error& e) {
      errors.push_back(Json{{"pair_id", p.pair_id}, {"message", e.what()}});
    }
  }

  std::map<std::pair<LanguageCode, std::string>, std::vector<ParallelPair>> groups;
  for (const auto& p : pairs) groups[{p.language, p.feature}].push_back(p);
  Json rows = Json::array();
  for (const auto& [key, group] : groups) {
    std::vector<std::string> pos;
    for (const auto& p : group) pos.push_back(p.pos_text);
    rows.push_back(Json{{"language", key.first.str()},
                        {"feature", key.second},
                        {"pairs", group.size()},
                        {"paraphrase_similarity", quality::paraphrase_similarity(group, *provider)},
                        {"diversity", pos.size() >= 2 ? Json(quality::diversity_score(pos, *provider))
                                                      : Json(nullptr)}});
  }
  std::vector<std::string> all_pos;
  for (const auto& p : pairs) all_pos.push_back(p.pos_text);
  const double sim = quality::paraphrase_similarity(pairs, *provider);

  CommandResult r;
  r.report = Json{{"pairs", pairs.size()},
                  {"valid", errors.empty()},
                  {"errors", errors},
                  {"paraphrase_similarity", sim},
                  {"diversity", all_pos.size() >= 2 ? Json(quality::diversity_score(all_pos, *provider))
                                                    : Json(nullptr)},
                  {"groups", std::move(rows)}};
  r.summary = "paraphrase_similarity " + fixed4(sim);
  if (!errors.empty()) {
    r.summary += ", " + std::to_string(errors.size()) + " invalid pairs";
    r.exit_code = exit_code_for(Errc::validation);
  }
  return r;
}

// av-eval ----------------------------------------------------------------

inline CommandResult cmd_av_eval(const Settings& s) {
  const auto pairs_path = s.input("pairs");
  const auto provider = make_provider(s.json().at("provider"));
  const double frac = s.get_or<double>("calibration_fraction", 0.5);
  const auto seed = s.get_or<std::uint64_t>("seed", 0);
  const auto report = evalsuite::av_evaluate(evalsuite::read_av_pairs(pairs_path), *provider, frac, seed);
  CommandResult r;
  r.report = to_json(report);
  r.summary = "auc " + fixed4(report.auc) + " accuracy " + fixed4(report.accuracy_at_threshold);
  return r;
}

// generate ---------------------------------------------------------------

/// Direct generation through the offline template client; a real model
/// client plugs in through datagen::TextGenClient.
inline CommandResult cmd_generate(const Settings& s) {
  const auto topics_path = s.input("topics");
  const std::filesystem::path out = s.str("out");
  const auto langs = load_languages(s);
  const auto features = load_features(s, langs);
  const auto lang = langs.resolve(s.str("language"));
  const std::string feature = s.str("feature");
  const auto count = s.get<std::size_t>("count");
  datagen::AttributePools pools;
  if (s.has("attribute_pools")) pools = datagen::AttributePools::from_json(io::read_json(s.input("attribute_pools")));
  datagen::GenerateOptions opts;
  opts.max_attempts = s.get_or<int>("max_attempts", 3);
  opts.parallelism = static_cast<int>(threads_of(s));
  const auto seed = s.get_or<std::uint64_t>("seed", 0);

  datagen::TemplateStubClient client(seed);
  Rng rng(seed);
  const auto result = datagen::generate_pairs(client, features, langs, lang, feature, count,
                                              datagen::read_topics(topics_path), pools, rng, opts);
  write_pairs(out, result.pairs);
  Json skipped = Json::array();
  for (const auto& k : result.skipped) skipped.push_back(to_json(k));
  CommandResult r;
  r.report = Json{{"generated", result.pairs.size()}, {"skipped", skipped}, {"out", out.string()}};
  r.summary = std::to_string(result.pairs.size()) + " pairs generated, " +
              std::to_string(result.skipped.size()) + " skipped";
  return r;
}

}  // namespace mstyle::cli
