#pragma once

// Synthetic corpus with a known, linearly recoverable style signal.
//
// Each (language, feature) cell holds aligned pairs: item k has the same
// concept list in every language, written with a per-language vocabulary in
// disjoint scripts so character n-grams never match across languages. The
// neg side swaps a few concepts for synonyms. The base provider concatenates
// hashed n-grams of the text with a 4-dim signal looked up from a side
// table: +s * e_f for pos sentences, -s * e_f for neg sentences.

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/embed/hashed_ngram.hpp"
#include "mstyle/embed/provider.hpp"

namespace mstyle::testing {

struct SyntheticCorpus {
  std::vector<ParallelPair> train;
  std::vector<ParallelPair> heldout;
  std::map<std::string, std::array<double, 4>> style;  // text -> signal
  std::vector<LanguageCode> languages;
  std::vector<std::string> features;
};

struct SyntheticOptions {
  std::size_t train_pairs = 50;
  std::size_t heldout_pairs = 20;
  std::size_t concepts_per_sentence = 6;
  std::size_t substitutions = 2;
  double signal = 0.05;
  std::uint64_t seed = 7;
};

namespace detail {

// Latin lowercase for the first language, Greek lowercase for the second.
inline std::string make_word(Rng& rng, std::size_t script) {
  static const char* latin[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "k", "l", "m", "n",
                                "o", "p", "r", "s", "t", "u", "v", "z"};
  static const char* greek[] = {"α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ", "ν",
                                "ξ", "ο", "π", "ρ", "σ", "τ", "υ", "φ"};
  const auto& letters = script == 0 ? latin : greek;
  std::string w;
  const std::size_t len = 4 + rng.uniform_index(4);
  for (std::size_t i = 0; i < len; ++i) w += letters[rng.uniform_index(21)];
  return w;
}

}  // namespace detail

inline SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& o = {}) {
  SyntheticCorpus c;
  c.languages = {LanguageCode("de"), LanguageCode("el")};
  c.features = {"formal_tone", "humor", "emojis", "sarcasm"};
  Rng rng(o.seed);

  // Two words per concept and language: the plain word and a synonym.
  const std::size_t concepts = 400;
  std::vector<std::vector<std::array<std::string, 2>>> vocab(c.languages.size());
  for (std::size_t l = 0; l < c.languages.size(); ++l)
    for (std::size_t k = 0; k < concepts; ++k)
      vocab[l].push_back({detail::make_word(rng, l), detail::make_word(rng, l)});

  const std::size_t per_cell = o.train_pairs + o.heldout_pairs;
  for (std::size_t f = 0; f < c.features.size(); ++f) {
    for (std::size_t item = 0; item < per_cell; ++item) {
      std::vector<std::size_t> meaning;
      for (std::size_t w = 0; w < o.concepts_per_sentence; ++w)
        meaning.push_back(rng.uniform_index(concepts));
      const auto swapped = rng.sample_indices(o.concepts_per_sentence, o.substitutions);
      for (std::size_t l = 0; l < c.languages.size(); ++l) {
        std::string pos, neg;
        for (std::size_t w = 0; w < meaning.size(); ++w) {
          const bool swap = std::find(swapped.begin(), swapped.end(), w) != swapped.end();
          if (w) {
            pos += ' ';
            neg += ' ';
          }
          pos += vocab[l][meaning[w]][0];
          neg += vocab[l][meaning[w]][swap ? 1 : 0];
        }
        pos += '.';
        neg += '.';
        ParallelPair p;
        char id[64];
        std::snprintf(id, sizeof id, "%s-%s-%03zu", c.languages[l].str().c_str(),
                      c.features[f].c_str(), item);
        p.pair_id = id;
        p.language = c.languages[l];
        p.feature = c.features[f];
        p.pos_text = pos;
        p.neg_text = neg;
        p.method = GenerationMethod::ground_truth;
        std::array<double, 4> sig{};
        sig[f] = o.signal;
        c.style[pos] = sig;
        sig[f] = -o.signal;
        c.style[neg] = sig;
        (item < o.train_pairs ? c.train : c.heldout).push_back(std::move(p));
      }
    }
  }
  return c;
}

/// Hashed n-grams (unit norm) followed by the style side-table signal.
inline ProviderPtr synthetic_base_provider(const SyntheticCorpus& c, std::size_t ngram_dim = 64) {
  auto style = c.style;
  return make_function_provider(ngram_dim + 4, [style, ngram_dim](const std::string& t) {
    const auto ng = hashed_ngram_embed(t, ngram_dim);
    std::vector<double> v(ng.values().begin(), ng.values().end());
    const auto it = style.find(t);
    for (std::size_t i = 0; i < 4; ++i) v.push_back(it == style.end() ? 0.0 : it->second[i]);
    return EmbeddingVector(std::move(v));
  });
}

}  // namespace mstyle::testing
