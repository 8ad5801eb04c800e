#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/embed/provider.hpp"
#include "mstyle/embed/vector.hpp"

namespace mstyle::quality {

/// Mean cosine similarity between the two sides of each pair.
inline double paraphrase_similarity(const std::vector<ParallelPair>& pairs,
                                    EmbeddingProvider& provider) {
  require(!pairs.empty(), Errc::precondition, "paraphrase_similarity: no pairs");
  std::vector<std::string> texts;
  texts.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    texts.push_back(p.pos_text);
    texts.push_back(p.neg_text);
  }
  const auto v = provider.embed_batch(texts);
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) sum += cosine_similarity(v[2 * i], v[2 * i + 1]);
  return sum / static_cast<double>(pairs.size());
}

/// Mean pairwise cosine distance over all unordered pairs of texts.
///
/// Each text's contribution is summed in a fixed canonical order (by the
/// texts themselves) so that the result does not depend on input order.
inline double diversity_score(const std::vector<std::string>& texts, EmbeddingProvider& provider) {
  require(texts.size() >= 2, Errc::domain, "diversity_score needs at least 2 texts");
  std::vector<std::string> sorted = texts;
  std::sort(sorted.begin(), sorted.end());
  const auto v = provider.embed_batch(sorted);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      sum += 1.0 - cosine_similarity(v[i], v[j]);
      ++count;
    }
  return sum / static_cast<double>(count);
}

}  // namespace mstyle::quality
