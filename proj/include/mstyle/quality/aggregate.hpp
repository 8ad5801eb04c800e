#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "mstyle/core/error.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/quality/annotation.hpp"

namespace mstyle::quality {

inline constexpr double presence_value(Presence p) {
  switch (p) {
    case Presence::yes: return 1.0;
    case Presence::possibly: return 0.5;
    case Presence::no: return 0.0;
  }
  return 0.0;
}

// The literal 0.67 / 0.33 constants, not 2/3 and 1/3.
inline constexpr double fluency_value(Fluency f) {
  switch (f) {
    case Fluency::fluent: return 1.0;
    case Fluency::mostly_fluent: return 0.67;
    case Fluency::mostly_disfluent: return 0.33;
    case Fluency::disfluent: return 0.0;
  }
  return 0.0;
}

namespace detail {

// Mean over category counts; independent of response order.
template <typename Enum, std::size_t N>
double mean_by_counts(std::span<const Enum> values, std::size_t min_annotators,
                      const std::array<double, N>& mapped, const char* what) {
  if (values.size() < min_annotators || values.empty())
    fail(Errc::insufficient_annotation,
         std::string(what) + ": " + std::to_string(values.size()) +
             " responses, at least " + std::to_string(std::max<std::size_t>(1, min_annotators)) +
             " required");
  std::array<std::size_t, N> counts{};
  for (Enum v : values) ++counts[static_cast<std::size_t>(v)];
  double sum = 0.0;
  for (std::size_t k = 0; k < N; ++k) sum += static_cast<double>(counts[k]) * mapped[k];
  return sum / static_cast<double>(values.size());
}

}  // namespace detail

inline double presence_score(std::span<const Presence> responses, std::size_t min_annotators = 3) {
  static constexpr std::array<double, 3> mapped{presence_value(Presence::yes),
                                                presence_value(Presence::possibly),
                                                presence_value(Presence::no)};
  return detail::mean_by_counts(responses, min_annotators, mapped, "presence_score");
}

inline double fluency_score(std::span<const Fluency> responses, std::size_t min_annotators = 3) {
  static constexpr std::array<double, 4> mapped{
      fluency_value(Fluency::fluent), fluency_value(Fluency::mostly_fluent),
      fluency_value(Fluency::mostly_disfluent), fluency_value(Fluency::disfluent)};
  return detail::mean_by_counts(responses, min_annotators, mapped, "fluency_score");
}

/// 1 iff the positive sentence scored strictly higher.
inline int pair_presence_correct(double pos_score, double neg_score) {
  return pos_score > neg_score ? 1 : 0;
}

struct MethodScores {
  double presence = 0.0;
  double fluency = 0.0;
};

/// Fluency decides unless the two are within `fluency_tie_threshold`; then
/// presence decides; a full tie goes to direct.
inline GenerationMethod select_generation_method(MethodScores direct, MethodScores translated,
                                                 double fluency_tie_threshold = 0.02) {
  for (double v : {direct.presence, direct.fluency, translated.presence, translated.fluency})
    require(v >= 0.0 && v <= 1.0, Errc::precondition, "method scores must lie in [0, 1]");
  if (std::abs(direct.fluency - translated.fluency) > fluency_tie_threshold)
    return direct.fluency > translated.fluency ? GenerationMethod::direct
                                               : GenerationMethod::translated;
  return translated.presence > direct.presence ? GenerationMethod::translated
                                               : GenerationMethod::direct;
}

}  // namespace mstyle::quality
