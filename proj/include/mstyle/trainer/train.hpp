#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/embed/provider.hpp"
#include "mstyle/trainer/loss.hpp"
#include "mstyle/trainer/projection.hpp"
#include "mstyle/trainer/sampling.hpp"

namespace mstyle::trainer {

/// Training hyperparameters. The defaults are placeholders, not tuned values.
struct TrainConfig {
  double margin = 0.5;
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double crosslingual_ratio = 0.5;
  std::uint64_t seed = 0;
  std::size_t triplets_per_epoch = 1024;
  std::size_t out_dim = 0;  // 0: same as the base provider
  double init_noise = 1e-3;

  void validate() const {
    require(std::isfinite(learning_rate) && learning_rate >= 0.0, Errc::validation,
            "learning_rate must be finite and >= 0");
    require(std::isfinite(margin) && margin >= 0.0, Errc::validation, "margin must be >= 0");
    require(epochs > 0, Errc::validation, "epochs must be positive");
    require(batch_size > 0, Errc::validation, "batch_size must be positive");
    require(triplets_per_epoch > 0, Errc::validation, "triplets_per_epoch must be positive");
    require(crosslingual_ratio >= 0.0 && crosslingual_ratio <= 1.0, Errc::validation,
            "crosslingual_ratio must lie in [0, 1]");
    require(out_dim == 0 || out_dim >= 2, Errc::validation, "out_dim must be >= 2");
    require(init_noise >= 0.0, Errc::validation, "init_noise must be >= 0");
  }

  static TrainConfig from_json(const Json& j) { return from_json(j, TrainConfig()); }

  static TrainConfig from_json(const Json& j, TrainConfig base) {
    auto opt = [&](const char* key, auto& dst) {
      if (j.contains(key)) dst = field<std::decay_t<decltype(dst)>>(j, key);
    };
    opt("margin", base.margin);
    opt("learning_rate", base.learning_rate);
    opt("epochs", base.epochs);
    opt("batch_size", base.batch_size);
    opt("crosslingual_ratio", base.crosslingual_ratio);
    opt("seed", base.seed);
    opt("triplets_per_epoch", base.triplets_per_epoch);
    opt("out_dim", base.out_dim);
    opt("init_noise", base.init_noise);
    base.validate();
    return base;
  }
};

inline Json to_json(const TrainConfig& c) {
  return Json{{"margin", c.margin},
              {"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"crosslingual_ratio", c.crosslingual_ratio},
              {"seed", c.seed},
              {"triplets_per_epoch", c.triplets_per_epoch},
              {"out_dim", c.out_dim},
              {"init_noise", c.init_noise}};
}

/// Row r has a one in column r mod in_dim (orthonormal rows when
/// out_dim <= in_dim) plus uniform noise in [-noise, noise].
inline ProjectionModel initial_model(std::size_t in_dim, std::size_t out_dim, double margin,
                                     double noise, Rng& rng) {
  ProjectionModel m(in_dim, out_dim, margin);
  for (std::size_t r = 0; r < out_dim; ++r) m.at(r, r % in_dim) = 1.0;
  for (double& w : m.weights) w += noise * (2.0 * rng.uniform01() - 1.0);
  return m;
}

struct TrainResult {
  ProjectionModel model;
  std::vector<double> epoch_loss;  // mean loss per epoch, in epoch order
};

/// One gradient step on a batch of base-embedded triplets. Gradients are
/// summed in batch order and averaged; returns the summed loss.
inline double apply_batch(ProjectionModel& model,
                          const std::vector<std::array<const EmbeddingVector*, 3>>& batch,
                          double learning_rate) {
  std::vector<double> grad(model.weights.size(), 0.0);
  double loss_sum = 0.0;
  for (const auto& t : batch) {
    const auto lg = loss_and_gradient(model, t[0]->values(), t[1]->values(), t[2]->values(),
                                      model.margin);
    loss_sum += lg.loss;
    if (!lg.active) continue;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += lg.gradient[i];
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < grad.size(); ++i)
    model.weights[i] -= learning_rate * (grad[i] * scale);
  return loss_sum;
}

/// Mini-batch gradient descent on the triplet loss.
///
/// Each epoch draws triplets_per_epoch fresh triplets from an Rng stream
/// derived from (seed, epoch), so a run is bitwise reproducible from
/// (seed, config, base provider). The epoch loss is the mean over that
/// epoch's triplets, each measured at the weights in effect for its batch.
inline TrainResult train(const std::vector<ParallelPair>& pairs, EmbeddingProvider& base,
                         const TrainConfig& config) {
  config.validate();
  require(!pairs.empty(), Errc::precondition, "train: empty dataset");
  const std::size_t in_dim = base.dim();
  const std::size_t out_dim = config.out_dim == 0 ? in_dim : config.out_dim;
  const Rng root(config.seed);
  Rng init_rng = root.fork(0);

  TrainResult result;
  result.model = initial_model(in_dim, out_dim, config.margin, config.init_noise, init_rng);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng epoch_rng = root.fork(epoch + 1);
    const auto triplets =
        sample_triplets(pairs, config.triplets_per_epoch, config.crosslingual_ratio, epoch_rng);

    std::vector<std::string> texts;
    texts.reserve(triplets.size() * 3);
    for (const auto& t : triplets) {
      texts.push_back(t.anchor.text);
      texts.push_back(t.pos.text);
      texts.push_back(t.neg.text);
    }
    const auto vectors = base.embed_batch(texts);

    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t b = 0; b < triplets.size(); b += config.batch_size, ++batch_index) {
      const std::size_t e = std::min(triplets.size(), b + config.batch_size);
      std::vector<std::array<const EmbeddingVector*, 3>> batch;
      batch.reserve(e - b);
      for (std::size_t i = b; i < e; ++i)
        batch.push_back({&vectors[3 * i], &vectors[3 * i + 1], &vectors[3 * i + 2]});
      double loss = 0.0;
      try {
        loss = apply_batch(result.model, batch, config.learning_rate);
      } catch (const Error& err) {
        throw Error(err.code(), "epoch " + std::to_string(epoch) + " batch " +
                                    std::to_string(batch_index) + ": " + err.what());
      }
      bool finite = std::isfinite(loss);
      for (double w : result.model.weights) finite = finite && std::isfinite(w);
      if (!finite)
        fail(Errc::numeric, "non-finite loss or weights at epoch " + std::to_string(epoch) +
                                " batch " + std::to_string(batch_index));
      epoch_loss += loss;
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(triplets.size()));
  }
  return result;
}

inline std::string loss_trace_csv(const std::vector<double>& epoch_loss) {
  std::string out = "epoch,mean_loss\n";
  char buf[64];
  for (std::size_t i = 0; i < epoch_loss.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, epoch_loss[i]);
    out += buf;
  }
  return out;
}

}  // namespace mstyle::trainer
