#pragma once

// Small pair corpora and toy providers shared by the tests.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/core/rng.hpp"
#include "mstyle/core/text.hpp"
#include "mstyle/embed/provider.hpp"

namespace mstyle::testing {

/// n pairs for one (language, feature). Positive texts start with "P", so
/// oracle_provider() can tell the polarity from the text alone.
inline std::vector<ParallelPair> make_pairs(const std::string& lang, const std::string& feature,
                                            std::size_t n, const std::string& tag = "") {
  std::vector<ParallelPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%04zu", i);
    ParallelPair p;
    p.pair_id = lang + "-" + feature + tag + "-" + id;
    p.language = LanguageCode(lang);
    p.feature = feature;
    p.pos_text = "P " + lang + " " + feature + tag + " item " + id;
    p.neg_text = "N " + lang + " " + feature + tag + " item " + id;
    p.method = GenerationMethod::ground_truth;
    out.push_back(p);
  }
  return out;
}

/// Aligned corpora for several languages.
inline std::map<LanguageCode, std::vector<ParallelPair>> make_aligned(
    const std::vector<std::string>& langs, const std::string& feature, std::size_t n) {
  std::map<LanguageCode, std::vector<ParallelPair>> out;
  for (const auto& l : langs) out[LanguageCode(l)] = make_pairs(l, feature, n);
  return out;
}

/// Positive texts at [1, 0], everything else at [0, 1].
inline ProviderPtr oracle_provider() {
  return make_function_provider(2, [](const std::string& t) {
    return t.rfind("P ", 0) == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
  });
}

inline ProviderPtr constant_provider() {
  return make_function_provider(3, [](const std::string&) { return std::vector<double>{0.3, -1.0, 2.0}; });
}

/// A Gaussian vector per text, seeded by (seed, text).
inline ProviderPtr random_provider(std::uint64_t seed, std::size_t dim = 16) {
  return make_function_provider(dim, [seed, dim](const std::string& t) {
    Rng rng(splitmix64(seed ^ text::fnv1a64(t)));
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    return v;
  });
}

/// Applies `fn` to every vector of `base`.
template <typename Fn>
ProviderPtr mapped_provider(ProviderPtr base, Fn fn) {
  const std::size_t dim = base->dim();
  return make_function_provider(dim, [base, fn](const std::string& t) {
    auto v = base->embed(t).raw();
    fn(v);
    return v;
  });
}

}  // namespace mstyle::testing
