#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/text.hpp"
#include "mstyle/embed/vector.hpp"

namespace mstyle {

struct NgramRange {
  int min_n = 2;
  int max_n = 4;
};

/// Character n-gram feature hashing.
///
/// The text is trimmed, NFC-normalized and lowercased, then split into code
/// points. Every n-gram for n in [min_n, max_n] is hashed with 64-bit FNV-1a
/// (seeded with n so equal byte strings of different orders stay distinct).
/// The low bits select the bucket (h mod dim), bit 63 selects the sign. Texts
/// shorter than min_n contribute themselves as a single gram. The bucket
/// counts are L2-normalized.
inline EmbeddingVector hashed_ngram_embed(std::string_view raw, std::size_t dim,
                                          NgramRange range = {}) {
  require(dim >= 16, Errc::precondition, "hashed_ngram: dim must be >= 16");
  require(range.min_n >= 1 && range.max_n <= 8 && range.min_n <= range.max_n,
          Errc::precondition, "hashed_ngram: n range must lie within [1, 8]");
  const std::string_view trimmed = text::trim(raw);
  if (trimmed.empty()) fail(Errc::domain, "hashed_ngram: empty text");

  const std::string prepared = text::lower(text::nfc(trimmed));
  const auto cps = text::code_points(prepared);
  std::vector<double> counts(dim, 0.0);

  auto add_gram = [&](std::string_view gram, int n) {
    const std::uint64_t h =
        text::fnv1a64(gram, text::fnv1a64(std::string_view("#" + std::to_string(n) + "#")));
    const std::size_t bucket = static_cast<std::size_t>(h % dim);
    counts[bucket] += (h >> 63) ? -1.0 : 1.0;
  };

  bool any = false;
  for (int n = range.min_n; n <= range.max_n; ++n) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (cps.size() < un) break;
    for (std::size_t i = 0; i + un <= cps.size(); ++i) {
      const char* begin = cps[i].data();
      const char* end = cps[i + un - 1].data() + cps[i + un - 1].size();
      add_gram(std::string_view(begin, static_cast<std::size_t>(end - begin)), n);
      any = true;
    }
  }
  if (!any) add_gram(prepared, static_cast<int>(cps.size()));

  if (!(vec::norm(counts) > 0.0))
    fail(Errc::domain, "hashed_ngram: signed n-gram counts cancel out for \"" +
                           std::string(trimmed) + "\"");
  return EmbeddingVector(vec::normalized(counts));
}

}  // namespace mstyle
