#pragma once

#include <vector>

#include "mstyle/benchmark/score.hpp"
#include "mstyle/benchmark/soc.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/trainer/projection.hpp"
#include "mstyle/trainer/train.hpp"
#include "synthetic.hpp"

namespace mstyle::testing {

struct LearningEffect {
  double untrained_multilingual = 0.0;
  double trained_multilingual = 0.0;
  double untrained_crosslingual = 0.0;
  double trained_crosslingual = 0.0;
  std::vector<double> epoch_loss;
};

/// Held-out SoC benchmarks: multilingual per (language, feature), and
/// cross-lingual per feature with each language as anchor.
inline std::vector<benchmark::SocInstance> heldout_multilingual(const SyntheticCorpus& c) {
  std::vector<benchmark::SocInstance> out;
  for (const auto& lang : c.languages)
    for (const auto& f : c.features) {
      std::vector<ParallelPair> cell;
      for (const auto& p : c.heldout)
        if (p.language == lang && p.feature == f) cell.push_back(p);
      auto block = benchmark::build_multilingual_soc(cell);
      out.insert(out.end(), block.begin(), block.end());
    }
  return out;
}

inline std::vector<benchmark::SocInstance> heldout_crosslingual(const SyntheticCorpus& c) {
  std::vector<benchmark::SocInstance> out;
  for (const auto& f : c.features) {
    std::vector<ParallelPair> cell;
    for (const auto& p : c.heldout)
      if (p.feature == f) cell.push_back(p);
    const auto corpora = benchmark::split_by_language(cell);
    for (const auto& anchor : c.languages) {
      auto block = benchmark::build_crosslingual_soc(corpora, anchor);
      out.insert(out.end(), block.begin(), block.end());
    }
  }
  return out;
}

/// "Untrained" is the projection the trainer starts from.
inline LearningEffect measure_learning_effect(const SyntheticCorpus& c,
                                              const trainer::TrainConfig& config) {
  auto base = synthetic_base_provider(c);
  const auto multi = heldout_multilingual(c);
  const auto cross = heldout_crosslingual(c);

  Rng init_rng = Rng(config.seed).fork(0);
  const auto dim = base->dim();
  auto untrained = trainer::trained_model_provider(
      trainer::initial_model(dim, config.out_dim ? config.out_dim : dim, config.margin,
                             config.init_noise, init_rng),
      base);
  const auto result = trainer::train(c.train, *base, config);
  auto trained = trainer::trained_model_provider(result.model, base);

  LearningEffect e;
  e.untrained_multilingual = benchmark::score_soc(multi, *untrained).accuracy;
  e.untrained_crosslingual = benchmark::score_soc(cross, *untrained).accuracy;
  e.trained_multilingual = benchmark::score_soc(multi, *trained).accuracy;
  e.trained_crosslingual = benchmark::score_soc(cross, *trained).accuracy;
  e.epoch_loss = result.epoch_loss;
  return e;
}

/// Configuration of the reference learning-effect run.
inline trainer::TrainConfig learning_effect_config() {
  trainer::TrainConfig c;
  c.seed = 11;
  c.crosslingual_ratio = 0.5;
  c.epochs = 30;
  c.triplets_per_epoch = 2048;
  c.batch_size = 32;
  c.learning_rate = 2.0;
  c.margin = 0.5;
  return c;
}

}  // namespace mstyle::testing
