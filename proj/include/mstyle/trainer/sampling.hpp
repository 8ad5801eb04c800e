#pragma once

#include <cfenv>
#include <cmath>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/core/rng.hpp"

namespace mstyle::trainer {

struct TaggedText {
  std::string text;
  LanguageCode language;
  bool operator==(const TaggedText&) const = default;
};

enum class NegSource { anchor_partner, pos_partner };

/// Anchor and pos share feature and polarity but come from different pairs;
/// neg is the paraphrase partner of one of them and always shares pos's
/// language.
struct TrainingTriplet {
  TaggedText anchor;
  TaggedText pos;
  TaggedText neg;
  std::string feature;
  bool crosslingual = false;
  bool positive_polarity = true;
  NegSource neg_source = NegSource::pos_partner;
  std::string anchor_pair_id;
  std::string pos_pair_id;

  bool operator==(const TrainingTriplet&) const = default;
};

inline Json to_json(const TrainingTriplet& t) {
  return Json{{"anchor", t.anchor.text},
              {"anchor_language", t.anchor.language.str()},
              {"pos", t.pos.text},
              {"neg", t.neg.text},
              {"target_language", t.pos.language.str()},
              {"feature", t.feature},
              {"crosslingual", t.crosslingual},
              {"polarity", t.positive_polarity ? "pos" : "neg"},
              {"neg_source", t.neg_source == NegSource::pos_partner ? "pos_partner" : "anchor_partner"},
              {"anchor_pair_id", t.anchor_pair_id},
              {"pos_pair_id", t.pos_pair_id}};
}

/// round(count * ratio) with ties to even, so 1 * 0.5 rounds to 0.
inline std::size_t crosslingual_quota(std::size_t count, double ratio) {
  require(ratio >= 0.0 && ratio <= 1.0, Errc::validation, "crosslingual_ratio must lie in [0, 1]");
  const int old = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double q = std::nearbyint(static_cast<double>(count) * ratio);
  std::fesetround(old);
  return static_cast<std::size_t>(q);
}

/// Draws `count` training triplets. Exactly crosslingual_quota(count, ratio)
/// of them are cross-lingual; which positions they occupy is shuffled.
///
/// Per triplet: a feature uniformly; then a language with at least two pairs
/// (monolingual) or an ordered pair of distinct languages (cross-lingual);
/// then distinct anchor and pos pairs and a polarity. Monolingual triplets
/// take neg from the anchor's or the pos's pair with equal odds;
/// cross-lingual ones always take pos's partner so pos and neg share a
/// language.
inline std::vector<TrainingTriplet> sample_triplets(const std::vector<ParallelPair>& pairs,
                                                    std::size_t count, double crosslingual_ratio,
                                                    Rng& rng) {
  require(count > 0, Errc::precondition, "sample_triplets: count must be positive");
  const std::size_t cross = crosslingual_quota(count, crosslingual_ratio);
  const std::size_t mono = count - cross;

  const PairIndex idx = index_pairs(pairs);
  require(!idx.empty(), Errc::sampling, "sample_triplets: no pairs");

  struct FeatureSlot {
    std::string id;
    std::vector<std::pair<LanguageCode, const std::vector<const ParallelPair*>*>> langs;
    std::vector<std::size_t> mono_langs;  // indices into langs with >= 2 pairs
  };
  std::vector<FeatureSlot> slots;
  for (const auto& [feature, by_lang] : idx) {
    FeatureSlot slot;
    slot.id = feature;
    for (const auto& [lang, list] : by_lang) {
      if (list.size() >= 2) slot.mono_langs.push_back(slot.langs.size());
      slot.langs.emplace_back(lang, &list);
    }
    if (mono > 0 && slot.mono_langs.empty())
      fail(Errc::sampling, "feature \"" + feature +
                               "\" has no language with two or more pairs for monolingual triplets");
    if (cross > 0 && slot.langs.size() < 2)
      fail(Errc::sampling, "feature \"" + feature + "\" appears in only one language (" +
                               slot.langs.front().first.str() +
                               ") and cannot form cross-lingual triplets");
    slots.push_back(std::move(slot));
  }

  std::vector<char> is_cross(count, 0);
  for (std::size_t i = 0; i < cross; ++i) is_cross[i] = 1;
  rng.shuffle(is_cross);

  std::vector<TrainingTriplet> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const FeatureSlot& slot = slots[rng.uniform_index(slots.size())];
    const ParallelPair* anchor = nullptr;
    const ParallelPair* pos = nullptr;
    TrainingTriplet tr;
    tr.feature = slot.id;
    if (is_cross[t]) {
      const std::size_t la = rng.uniform_index(slot.langs.size());
      std::size_t lp = rng.uniform_index(slot.langs.size() - 1);
      if (lp >= la) ++lp;
      const auto& alist = *slot.langs[la].second;
      const auto& plist = *slot.langs[lp].second;
      anchor = alist[rng.uniform_index(alist.size())];
      pos = plist[rng.uniform_index(plist.size())];
      tr.crosslingual = true;
      tr.neg_source = NegSource::pos_partner;
    } else {
      const std::size_t li = slot.mono_langs[rng.uniform_index(slot.mono_langs.size())];
      const auto& list = *slot.langs[li].second;
      const std::size_t ia = rng.uniform_index(list.size());
      std::size_t ip = rng.uniform_index(list.size() - 1);
      if (ip >= ia) ++ip;
      anchor = list[ia];
      pos = list[ip];
      tr.crosslingual = false;
      tr.neg_source = rng.coin() ? NegSource::anchor_partner : NegSource::pos_partner;
    }
    tr.positive_polarity = rng.coin();
    auto same = [&](const ParallelPair& p) {
      return tr.positive_polarity ? p.pos_text : p.neg_text;
    };
    auto opposite = [&](const ParallelPair& p) {
      return tr.positive_polarity ? p.neg_text : p.pos_text;
    };
    tr.anchor = {same(*anchor), anchor->language};
    tr.pos = {same(*pos), pos->language};
    const ParallelPair& partner = tr.neg_source == NegSource::pos_partner ? *pos : *anchor;
    tr.neg = {opposite(partner), partner.language};
    tr.anchor_pair_id = anchor->pair_id;
    tr.pos_pair_id = pos->pair_id;
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace mstyle::trainer
