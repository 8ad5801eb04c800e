#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/parallel_pair.hpp"

namespace mstyle::benchmark {

enum class SocKind { multilingual, crosslingual };
enum class Polarity { pos, neg };

inline std::string to_string(SocKind k) {
  return k == SocKind::multilingual ? "multilingual" : "crosslingual";
}
inline std::string to_string(Polarity p) { return p == Polarity::pos ? "pos" : "neg"; }

inline SocKind parse_kind(const std::string& s) {
  if (s == "multilingual") return SocKind::multilingual;
  if (s == "crosslingual") return SocKind::crosslingual;
  fail(Errc::validation, "unknown SoC kind \"" + s + "\" (expected multilingual or crosslingual)");
}

inline Polarity parse_polarity(const std::string& s) {
  if (s == "pos") return Polarity::pos;
  if (s == "neg") return Polarity::neg;
  fail(Errc::validation, "unknown polarity \"" + s + "\" (expected pos or neg)");
}

/// (anchor, pos, neg) triple. pos and neg come from the same pair, so neg is a
/// paraphrase of pos; the anchor shares pos's style but not its content.
struct SocInstance {
  std::string anchor_text;
  std::string pos_text;
  std::string neg_text;
  LanguageCode anchor_language;
  LanguageCode target_language;
  std::string feature;
  std::string anchor_pair_id;
  std::string target_pair_id;
  SocKind kind = SocKind::multilingual;

  bool operator==(const SocInstance&) const = default;
};

inline void to_json(Json& j, const SocInstance& s) {
  j = Json{{"anchor_text", s.anchor_text},
           {"pos_text", s.pos_text},
           {"neg_text", s.neg_text},
           {"anchor_language", s.anchor_language.str()},
           {"target_language", s.target_language.str()},
           {"feature", s.feature},
           {"anchor_pair_id", s.anchor_pair_id},
           {"target_pair_id", s.target_pair_id},
           {"kind", to_string(s.kind)}};
}

inline void check_instance(const SocInstance& s) {
  if (s.kind == SocKind::multilingual && s.anchor_language != s.target_language)
    fail(Errc::validation, "multilingual instance with different anchor/target languages");
  if (s.kind == SocKind::crosslingual && s.anchor_language == s.target_language)
    fail(Errc::validation, "crosslingual instance with equal anchor/target languages");
  if (s.anchor_pair_id == s.target_pair_id)
    fail(Errc::validation, "instance anchors on its own target pair " + s.anchor_pair_id);
}

inline SocInstance instance_from_json(const Json& j) {
  SocInstance s;
  s.anchor_text = field<std::string>(j, "anchor_text");
  s.pos_text = field<std::string>(j, "pos_text");
  s.neg_text = field<std::string>(j, "neg_text");
  s.anchor_language = LanguageCode(field<std::string>(j, "anchor_language"));
  s.target_language = LanguageCode(field<std::string>(j, "target_language"));
  s.feature = field<std::string>(j, "feature");
  s.anchor_pair_id = field<std::string>(j, "anchor_pair_id");
  s.target_pair_id = field<std::string>(j, "target_pair_id");
  s.kind = parse_kind(field<std::string>(j, "kind"));
  check_instance(s);
  return s;
}

inline std::vector<SocInstance> read_benchmark(const std::filesystem::path& path) {
  return io::read_jsonl<SocInstance>(path, instance_from_json);
}

inline void write_benchmark(const std::filesystem::path& path,
                            const std::vector<SocInstance>& instances) {
  io::write_file(path, io::to_jsonl(instances, [](const SocInstance& s) { return Json(s); }));
}

namespace detail {

inline const std::string& side(const ParallelPair& p, Polarity pol) {
  return pol == Polarity::pos ? p.pos_text : p.neg_text;
}
inline const std::string& other_side(const ParallelPair& p, Polarity pol) {
  return pol == Polarity::pos ? p.neg_text : p.pos_text;
}

}  // namespace detail

/// All C(n,2) instances for one (language, feature) corpus.
///
/// Pairs are ordered by pair_id; for every i < j the anchor is pair i's
/// sentence of `anchor_polarity`, pos is pair j's sentence of that polarity
/// and neg is pair j's opposite sentence. One orientation per unordered pair
/// is what yields C(n,2).
inline std::vector<SocInstance> build_multilingual_soc(std::vector<ParallelPair> pairs,
                                                       Polarity anchor_polarity = Polarity::pos) {
  if (pairs.size() < 2)
    fail(Errc::precondition, "multilingual SoC needs at least 2 pairs, got " +
                                 std::to_string(pairs.size()));
  const LanguageCode lang = pairs.front().language;
  const std::string feature = pairs.front().feature;
  std::set<std::string> ids;
  for (const auto& p : pairs) {
    if (p.language != lang || p.feature != feature)
      fail(Errc::validation, "multilingual SoC input mixes (language, feature): (" + lang.str() +
                                 ", " + feature + ") vs (" + p.language.str() + ", " +
                                 p.feature + ") in pair " + p.pair_id);
    if (!ids.insert(p.pair_id).second)
      fail(Errc::validation, "duplicate pair_id \"" + p.pair_id + "\"");
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const ParallelPair& a, const ParallelPair& b) { return a.pair_id < b.pair_id; });

  std::vector<SocInstance> out;
  out.reserve(pairs.size() * (pairs.size() - 1) / 2);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      SocInstance s;
      s.anchor_text = detail::side(pairs[i], anchor_polarity);
      s.pos_text = detail::side(pairs[j], anchor_polarity);
      s.neg_text = detail::other_side(pairs[j], anchor_polarity);
      s.anchor_language = lang;
      s.target_language = lang;
      s.feature = feature;
      s.anchor_pair_id = pairs[i].pair_id;
      s.target_pair_id = pairs[j].pair_id;
      s.kind = SocKind::multilingual;
      out.push_back(std::move(s));
    }
  }
  return out;
}

/// Cross-lingual instances for one anchor language.
///
/// `corpora` holds index-aligned pair lists (pair k in every language is the
/// same parallel item). For every target language T != anchor (in code
/// order) and every ordered (i, j) with i != j: the anchor comes from the
/// anchor corpus at i, pos/neg from corpus T at j. Yields n(n-1)(k-1).
inline std::vector<SocInstance> build_crosslingual_soc(
    const std::map<LanguageCode, std::vector<ParallelPair>>& corpora,
    const LanguageCode& anchor_language, Polarity anchor_polarity = Polarity::pos) {
  if (corpora.size() < 2)
    fail(Errc::validation, "cross-lingual SoC needs at least 2 languages, got " +
                               std::to_string(corpora.size()));
  const auto anchor_it = corpora.find(anchor_language);
  if (anchor_it == corpora.end())
    fail(Errc::validation, "anchor language " + anchor_language.str() + " has no corpus");
  const std::size_t n = anchor_it->second.size();
  if (n < 2)
    fail(Errc::precondition, "cross-lingual SoC needs at least 2 pairs per language");
  const std::string feature = anchor_it->second.front().feature;
  std::set<std::string> ids;
  for (const auto& [lang, corpus] : corpora) {
    if (corpus.size() != n)
      fail(Errc::alignment, "corpus " + lang.str() + " has " + std::to_string(corpus.size()) +
                                " pairs, anchor corpus has " + std::to_string(n));
    for (const auto& p : corpus) {
      if (p.language != lang)
        fail(Errc::validation, "pair " + p.pair_id + " is " + p.language.str() +
                                   " but sits in the " + lang.str() + " corpus");
      if (p.feature != feature)
        fail(Errc::validation, "cross-lingual SoC input mixes features: " + feature + " and " +
                                   p.feature);
      if (!ids.insert(p.pair_id).second)
        fail(Errc::validation, "duplicate pair_id \"" + p.pair_id + "\"");
    }
  }

  const auto& anchors = anchor_it->second;
  std::vector<SocInstance> out;
  out.reserve(n * (n - 1) * (corpora.size() - 1));
  for (const auto& [target, corpus] : corpora) {
    if (target == anchor_language) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        SocInstance s;
        s.anchor_text = detail::side(anchors[i], anchor_polarity);
        s.pos_text = detail::side(corpus[j], anchor_polarity);
        s.neg_text = detail::other_side(corpus[j], anchor_polarity);
        s.anchor_language = anchor_language;
        s.target_language = target;
        s.feature = feature;
        s.anchor_pair_id = anchors[i].pair_id;
        s.target_pair_id = corpus[j].pair_id;
        s.kind = SocKind::crosslingual;
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

/// Groups a flat pair list into aligned per-language corpora, keeping file
/// order within each language.
inline std::map<LanguageCode, std::vector<ParallelPair>> split_by_language(
    const std::vector<ParallelPair>& pairs) {
  std::map<LanguageCode, std::vector<ParallelPair>> out;
  for (const auto& p : pairs) out[p.language].push_back(p);
  return out;
}

}  // namespace mstyle::benchmark
