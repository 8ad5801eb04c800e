#pragma once

#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mstyle/benchmark/soc.hpp"
#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/embed/provider.hpp"
#include "mstyle/embed/vector.hpp"

namespace mstyle::benchmark {

enum class TiePolicy { strict_fail, half_credit };

inline std::string to_string(TiePolicy t) {
  return t == TiePolicy::strict_fail ? "strict_fail" : "half_credit";
}

inline TiePolicy parse_tie_policy(const std::string& s) {
  if (s == "strict_fail") return TiePolicy::strict_fail;
  if (s == "half_credit") return TiePolicy::half_credit;
  fail(Errc::validation, "unknown tie policy \"" + s + "\" (expected strict_fail or half_credit)");
}

struct SocCounts {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t ties = 0;

  double accuracy(TiePolicy policy) const {
    if (total == 0) return 0.0;
    const double credit = static_cast<double>(correct) +
                          (policy == TiePolicy::half_credit ? 0.5 * static_cast<double>(ties) : 0.0);
    return credit / static_cast<double>(total);
  }

  SocCounts& operator+=(const SocCounts& o) {
    total += o.total;
    correct += o.correct;
    ties += o.ties;
    return *this;
  }
};

struct SocBreakdown {
  LanguageCode language;
  std::string feature;
  SocCounts counts;
  double accuracy = 0.0;
};

struct SocReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t ties = 0;
  double accuracy = 0.0;
  TiePolicy tie_policy = TiePolicy::strict_fail;
  std::vector<SocBreakdown> breakdown;  // sorted by (language, feature)
};

inline Json to_json(const SocReport& r) {
  Json rows = Json::array();
  for (const auto& b : r.breakdown)
    rows.push_back(Json{{"language", b.language.str()},
                        {"feature", b.feature},
                        {"total", b.counts.total},
                        {"correct", b.counts.correct},
                        {"ties", b.counts.ties},
                        {"accuracy", b.accuracy}});
  return Json{{"total", r.total},         {"correct", r.correct},
              {"ties", r.ties},           {"accuracy", r.accuracy},
              {"tie_policy", to_string(r.tie_policy)}, {"breakdown", std::move(rows)}};
}

enum class Outcome { correct, tie, incorrect };

/// Strict comparison of the two similarities; equality is a tie.
inline Outcome judge(const EmbeddingVector& anchor, const EmbeddingVector& pos,
                     const EmbeddingVector& neg) {
  const double sp = cosine_similarity(anchor, pos);
  const double sn = cosine_similarity(anchor, neg);
  if (sp > sn) return Outcome::correct;
  if (sp == sn) return Outcome::tie;
  return Outcome::incorrect;
}

/// Scores every instance with `provider`. Instances are split into
/// contiguous blocks (one per thread) whose counts are summed afterwards;
/// the result is the same for any thread count.
inline SocReport score_soc(const std::vector<SocInstance>& instances, EmbeddingProvider& provider,
                           TiePolicy tie_policy = TiePolicy::strict_fail, unsigned threads = 1) {
  require(!instances.empty(), Errc::precondition, "score_soc: no instances");

  // Embed every distinct text once, in first-appearance order.
  std::vector<std::string> unique;
  {
    std::unordered_map<std::string_view, bool> seen;
    for (const auto& s : instances)
      for (const std::string* t : {&s.anchor_text, &s.pos_text, &s.neg_text})
        if (!seen[*t]) {
          seen[*t] = true;
          unique.push_back(*t);
        }
  }
  std::unordered_map<std::string, EmbeddingVector> vectors;
  try {
    constexpr std::size_t chunk = 512;
    for (std::size_t b = 0; b < unique.size(); b += chunk) {
      const std::size_t e = std::min(unique.size(), b + chunk);
      std::vector<std::string> part(unique.begin() + static_cast<std::ptrdiff_t>(b),
                                    unique.begin() + static_cast<std::ptrdiff_t>(e));
      auto vs = provider.embed_batch(part);
      for (std::size_t k = 0; k < part.size(); ++k) vectors.emplace(part[k], std::move(vs[k]));
    }
  } catch (const Error&) {
    // Re-embed instance by instance to report which one fails.
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& s = instances[i];
      try {
        provider.embed_batch(std::vector<std::string>{s.anchor_text, s.pos_text, s.neg_text});
      } catch (const Error& e) {
        throw Error(e.code(), "instance " + std::to_string(i) + ": " + e.what());
      }
    }
    throw;
  }

  using Key = std::pair<LanguageCode, std::string>;
  const std::size_t n = instances.size();
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::map<Key, SocCounts>> partial(workers);
  auto work = [&](unsigned w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    auto& acc = partial[w];
    for (std::size_t i = begin; i < end; ++i) {
      const auto& s = instances[i];
      Outcome o;
      try {
        o = judge(vectors.at(s.anchor_text), vectors.at(s.pos_text), vectors.at(s.neg_text));
      } catch (const Error& e) {
        throw Error(e.code(), "instance " + std::to_string(i) + ": " + e.what());
      }
      auto& c = acc[{s.anchor_language, s.feature}];
      ++c.total;
      if (o == Outcome::correct) ++c.correct;
      if (o == Outcome::tie) ++c.ties;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::map<Key, SocCounts> merged;
  for (const auto& part : partial)
    for (const auto& [k, c] : part) merged[k] += c;

  SocReport report;
  report.tie_policy = tie_policy;
  SocCounts all;
  for (const auto& [k, c] : merged) {
    all += c;
    report.breakdown.push_back({k.first, k.second, c, c.accuracy(tie_policy)});
  }
  report.total = all.total;
  report.correct = all.correct;
  report.ties = all.ties;
  report.accuracy = all.accuracy(tie_policy);
  return report;
}

}  // namespace mstyle::benchmark
