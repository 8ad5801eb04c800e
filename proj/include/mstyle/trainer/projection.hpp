#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/embed/provider.hpp"
#include "mstyle/embed/vector.hpp"

namespace mstyle::trainer {

/// Linear style head: out_dim x in_dim weights, row-major.
struct ProjectionModel {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  double margin = 0.5;
  std::vector<double> weights;

  ProjectionModel() = default;
  ProjectionModel(std::size_t in, std::size_t out, double m)
      : in_dim(in), out_dim(out), margin(m), weights(in * out, 0.0) {
    validate();
  }

  double& at(std::size_t r, std::size_t c) { return weights[r * in_dim + c]; }
  double at(std::size_t r, std::size_t c) const { return weights[r * in_dim + c]; }

  void validate() const {
    require(in_dim > 0, Errc::validation, "projection in_dim must be > 0");
    require(out_dim >= 2, Errc::validation, "projection out_dim must be >= 2");
    require(margin >= 0.0 && std::isfinite(margin), Errc::validation,
            "projection margin must be finite and >= 0");
    require(weights.size() == in_dim * out_dim, Errc::shape,
            "projection weights have " + std::to_string(weights.size()) + " entries, expected " +
                std::to_string(in_dim * out_dim));
    for (double w : weights)
      require(std::isfinite(w), Errc::numeric, "projection weights contain a non-finite value");
  }

  /// W · x (unnormalized).
  std::vector<double> project(std::span<const double> x) const {
    require(x.size() == in_dim, Errc::shape,
            "projection expects dim " + std::to_string(in_dim) + ", got " + std::to_string(x.size()));
    std::vector<double> y(out_dim, 0.0);
    for (std::size_t r = 0; r < out_dim; ++r) {
      const double* row = weights.data() + r * in_dim;
      double s = 0.0;
      for (std::size_t c = 0; c < in_dim; ++c) s += row[c] * x[c];
      y[r] = s;
    }
    return y;
  }

  bool operator==(const ProjectionModel&) const = default;
};

inline Json to_json(const ProjectionModel& m) {
  return Json{{"in_dim", m.in_dim}, {"out_dim", m.out_dim}, {"margin", m.margin},
              {"weights", m.weights}};
}

inline ProjectionModel model_from_json(const Json& j) {
  ProjectionModel m;
  m.in_dim = field<std::size_t>(j, "in_dim");
  m.out_dim = field<std::size_t>(j, "out_dim");
  m.margin = field<double>(j, "margin");
  m.weights = field<std::vector<double>>(j, "weights");
  m.validate();
  return m;
}

inline void save_model(const std::filesystem::path& path, const ProjectionModel& m) {
  // Compact: weight matrices get large.
  io::write_file(path, to_json(m).dump() + "\n");
}

inline ProjectionModel load_model(const std::filesystem::path& path) {
  return model_from_json(io::read_json(path));
}

/// Embeds text as normalize(W · base(text)).
class TrainedModelProvider final : public EmbeddingProvider {
 public:
  TrainedModelProvider(ProjectionModel model, ProviderPtr base)
      : model_(std::move(model)), base_(std::move(base)) {
    model_.validate();
    require(base_ != nullptr, Errc::validation, "trained_model: missing base provider");
    if (base_->dim() != model_.in_dim)
      fail(Errc::shape, "trained_model: model in_dim " + std::to_string(model_.in_dim) +
                            " does not match base provider dim " + std::to_string(base_->dim()));
  }

  ProviderKind kind() const override { return ProviderKind::trained_model; }
  std::size_t dim() override { return model_.out_dim; }
  const ProjectionModel& model() const { return model_; }

 protected:
  std::vector<EmbeddingVector> compute(std::span<const std::string> texts) override {
    std::vector<std::string> list(texts.begin(), texts.end());
    const auto base = base_->embed_batch(list);
    std::vector<EmbeddingVector> out;
    out.reserve(base.size());
    for (const auto& b : base) out.emplace_back(vec::normalized(model_.project(b.values())));
    return out;
  }

 private:
  ProjectionModel model_;
  ProviderPtr base_;
};

inline ProviderPtr trained_model_provider(ProjectionModel model, ProviderPtr base) {
  return std::make_shared<TrainedModelProvider>(std::move(model), std::move(base));
}

}  // namespace mstyle::trainer
