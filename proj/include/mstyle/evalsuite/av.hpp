#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/embed/provider.hpp"
#include "mstyle/embed/vector.hpp"

namespace mstyle::evalsuite {

struct AvPair {
  std::string pair_id;
  std::vector<std::string> doc_a;
  std::vector<std::string> doc_b;
  LanguageCode language;
  std::optional<bool> same_author;

  bool operator==(const AvPair&) const = default;
};

inline void to_json(Json& j, const AvPair& p) {
  j = Json{{"pair_id", p.pair_id}, {"language", p.language.str()}, {"doc_a", p.doc_a},
           {"doc_b", p.doc_b}};
  if (p.same_author) j["same_author"] = *p.same_author;
}

inline AvPair av_pair_from_json(const Json& j) {
  AvPair p;
  p.pair_id = field<std::string>(j, "pair_id");
  p.language = LanguageCode(field<std::string>(j, "language"));
  p.doc_a = field<std::vector<std::string>>(j, "doc_a");
  p.doc_b = field<std::vector<std::string>>(j, "doc_b");
  if (j.contains("same_author") && !j.at("same_author").is_null())
    p.same_author = field<bool>(j, "same_author");
  require(!p.doc_a.empty() && !p.doc_b.empty(), Errc::validation,
          "AV pair " + p.pair_id + " has an empty document");
  return p;
}

inline std::vector<AvPair> read_av_pairs(const std::filesystem::path& path) {
  return io::read_jsonl<AvPair>(path, av_pair_from_json);
}

/// L2-normalized mean of the sentence embeddings.
inline EmbeddingVector av_document_embedding(const std::vector<std::string>& doc,
                                             EmbeddingProvider& provider) {
  require(!doc.empty(), Errc::precondition, "av_document_embedding: empty document");
  const auto vs = provider.embed_batch(doc);
  std::vector<double> mean(vs.front().dim(), 0.0);
  for (const auto& v : vs) {
    vec::check_same_dim(mean, v.values());
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  for (double& x : mean) x /= static_cast<double>(vs.size());
  return EmbeddingVector(vec::normalized(mean));
}

/// Area under the ROC curve by midranks: tied scores share their average
/// rank, which counts a tied positive/negative pair as one half.
inline double auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  require(scores.size() == labels.size(), Errc::shape, "auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(scores.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = mid;
    i = j;
  }
  double pos = 0.0, neg = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      pos += 1.0;
      rank_sum += rank[i];
    } else {
      neg += 1.0;
    }
  }
  require(pos > 0.0 && neg > 0.0, Errc::calibration, "auc needs both classes");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

/// Threshold t maximizing accuracy of "same author iff score >= t". Ties go
/// to the lowest t.
inline double calibrate_threshold(const std::vector<double>& scores,
                                  const std::vector<bool>& labels) {
  std::vector<double> candidates = scores;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.push_back(std::nextafter(candidates.back(), std::numeric_limits<double>::infinity()));
  double best_t = candidates.front();
  std::size_t best = 0;
  for (double t : candidates) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) hits += (scores[i] >= t) == labels[i];
    if (hits > best) {
      best = hits;
      best_t = t;
    }
  }
  return best_t;
}

struct AvReport {
  double auc = 0.5;
  double accuracy_at_threshold = 0.0;
  double threshold = 0.0;
  std::size_t n = 0;  // evaluation pairs
  std::size_t n_calibration = 0;
};

inline Json to_json(const AvReport& r) {
  return Json{{"auc", r.auc},
              {"accuracy_at_threshold", r.accuracy_at_threshold},
              {"threshold", r.threshold},
              {"n", r.n},
              {"n_calibration", r.n_calibration}};
}

/// Cosine similarity of the two document embeddings of each pair.
inline std::vector<double> av_scores(const std::vector<AvPair>& pairs, EmbeddingProvider& provider) {
  std::vector<double> s;
  s.reserve(pairs.size());
  for (const auto& p : pairs)
    s.push_back(cosine_similarity(av_document_embedding(p.doc_a, provider),
                                  av_document_embedding(p.doc_b, provider)));
  return s;
}

/// Seeded shuffle, first round(fraction * n) pairs calibrate the threshold,
/// the rest are evaluated.
inline AvReport av_evaluate(const std::vector<AvPair>& pairs, EmbeddingProvider& provider,
                            double calibration_fraction = 0.5, std::uint64_t seed = 0) {
  require(calibration_fraction > 0.0 && calibration_fraction < 1.0, Errc::validation,
          "calibration_fraction must lie in (0, 1)");
  for (const auto& p : pairs)
    require(p.same_author.has_value(), Errc::validation,
            "AV pair " + p.pair_id + " has no same_author label");
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_cal =
      static_cast<std::size_t>(std::nearbyint(calibration_fraction * static_cast<double>(pairs.size())));
  require(n_cal >= 2 && pairs.size() - n_cal >= 2, Errc::precondition,
          "av_evaluate needs at least 2 labeled pairs in each split (have " +
              std::to_string(pairs.size()) + " pairs)");

  const auto scores = av_scores(pairs, provider);
  std::vector<double> cal_s, ev_s;
  std::vector<bool> cal_l, ev_l;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    auto& s = k < n_cal ? cal_s : ev_s;
    auto& l = k < n_cal ? cal_l : ev_l;
    s.push_back(scores[i]);
    l.push_back(*pairs[i].same_author);
  }
  const auto positives = std::count(cal_l.begin(), cal_l.end(), true);
  if (positives == 0 || positives == static_cast<long>(cal_l.size()))
    fail(Errc::calibration, "calibration split contains a single class");

  AvReport r;
  r.n = ev_s.size();
  r.n_calibration = cal_s.size();
  r.threshold = calibrate_threshold(cal_s, cal_l);
  r.auc = auc(ev_s, ev_l);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ev_s.size(); ++i) hits += (ev_s[i] >= r.threshold) == ev_l[i];
  r.accuracy_at_threshold = static_cast<double>(hits) / static_cast<double>(ev_s.size());
  return r;
}

}  // namespace mstyle::evalsuite
