#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/quality/aggregate.hpp"
#include "mstyle/quality/annotation.hpp"

namespace mstyle::quality {

enum class AlphaMetric { nominal, ordinal, interval };

inline std::string to_string(AlphaMetric m) {
  switch (m) {
    case AlphaMetric::nominal: return "nominal";
    case AlphaMetric::ordinal: return "ordinal";
    case AlphaMetric::interval: return "interval";
  }
  return "nominal";
}

/// Reliability data: cells[annotator][task], empty where the annotator gave
/// no response. Cell values are category codes (nominal) or the numeric
/// values categories stand for (ordinal, interval).
struct AgreementInput {
  std::vector<std::vector<std::optional<double>>> cells;
  AlphaMetric metric = AlphaMetric::nominal;
};

struct AlphaResult {
  double alpha = 1.0;
  bool degenerate = false;  // no expected disagreement; alpha defined as 1
  double pairable_values = 0.0;
};

/// Krippendorff's alpha from the coincidence matrix.
///
/// Units (tasks) with fewer than two values are not pairable and are
/// dropped. o[c][k] = sum over units of n_uc (n_uk - [c == k]) / (m_u - 1);
/// n_c are its marginals and n their sum.
///   D_o = sum o[c][k] d2(c,k) / n
///   D_e = sum n_c n_k d2(c,k) / (n (n - 1))
///   alpha = 1 - D_o / D_e
/// d2 is [c != k] (nominal), (v_c - v_k)^2 (interval), or
/// (sum_{g from c to k} n_g - (n_c + n_k) / 2)^2 (ordinal).
inline AlphaResult krippendorff_alpha(const AgreementInput& input) {
  const auto& cells = input.cells;
  require(cells.size() >= 2, Errc::validation, "alpha needs at least 2 annotators");
  const std::size_t tasks = cells.front().size();
  for (const auto& row : cells)
    require(row.size() == tasks, Errc::shape, "reliability matrix rows differ in length");

  std::vector<double> values;
  for (const auto& row : cells)
    for (const auto& c : row)
      if (c) values.push_back(*c);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t k = values.size();
  auto index_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) -
                                    values.begin());
  };

  std::vector<double> o(k * k, 0.0);
  bool any_pairable = false;
  std::vector<double> unit_counts(k);
  for (std::size_t u = 0; u < tasks; ++u) {
    std::fill(unit_counts.begin(), unit_counts.end(), 0.0);
    double m = 0.0;
    for (const auto& row : cells)
      if (row[u]) {
        unit_counts[index_of(*row[u])] += 1.0;
        m += 1.0;
      }
    if (m < 2.0) continue;
    any_pairable = true;
    for (std::size_t c = 0; c < k; ++c) {
      if (unit_counts[c] == 0.0) continue;
      for (std::size_t d = 0; d < k; ++d) {
        const double same = (c == d) ? 1.0 : 0.0;
        o[c * k + d] += unit_counts[c] * (unit_counts[d] - same) / (m - 1.0);
      }
    }
  }
  require(any_pairable, Errc::validation, "alpha needs at least one task with 2 or more responses");

  std::vector<double> nc(k, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) nc[c] += o[c * k + d];
    n += nc[c];
  }

  auto delta2 = [&](std::size_t c, std::size_t d) -> double {
    if (c == d) return 0.0;
    switch (input.metric) {
      case AlphaMetric::nominal:
        return 1.0;
      case AlphaMetric::interval: {
        const double diff = values[c] - values[d];
        return diff * diff;
      }
      case AlphaMetric::ordinal: {
        const std::size_t lo = std::min(c, d), hi = std::max(c, d);
        double s = 0.0;
        for (std::size_t g = lo; g <= hi; ++g) s += nc[g];
        s -= (nc[c] + nc[d]) / 2.0;
        return s * s;
      }
    }
    return 0.0;
  };

  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) {
      const double w = delta2(c, d);
      observed += o[c * k + d] * w;
      expected += nc[c] * nc[d] * w;
    }
  observed /= n;
  expected /= n * (n - 1.0);

  AlphaResult r;
  r.pairable_values = n;
  if (!(expected > 0.0)) {
    r.alpha = 1.0;
    r.degenerate = true;
    return r;
  }
  r.alpha = 1.0 - observed / expected;
  return r;
}

/// Builds the reliability matrix from annotation responses, restricted to
/// `task_ids` (column order) and using `code` to map a response to a cell.
template <typename CodeFn>
AgreementInput agreement_input(const std::vector<AnnotationResponse>& responses,
                               const std::vector<std::string>& task_ids, AlphaMetric metric,
                               CodeFn code) {
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < task_ids.size(); ++i) column.emplace(task_ids[i], i);
  std::map<std::string, std::size_t> row_of;
  AgreementInput in;
  in.metric = metric;
  for (const auto& r : responses) {
    const auto col = column.find(r.task_id);
    if (col == column.end()) continue;
    auto [it, inserted] = row_of.emplace(r.annotator_id, in.cells.size());
    if (inserted) in.cells.emplace_back(task_ids.size());
    in.cells[it->second][col->second] = code(r);
  }
  return in;
}

/// Presence judgments as nominal categories.
inline AgreementInput presence_agreement(const std::vector<AnnotationResponse>& responses,
                                         const std::vector<std::string>& task_ids) {
  return agreement_input(responses, task_ids, AlphaMetric::nominal,
                         [](const AnnotationResponse& r) { return presence_value(r.presence); });
}

/// Fluency ratings at their interval values {0, 0.33, 0.67, 1}.
inline AgreementInput fluency_agreement(const std::vector<AnnotationResponse>& responses,
                                        const std::vector<std::string>& task_ids) {
  return agreement_input(responses, task_ids, AlphaMetric::interval,
                         [](const AnnotationResponse& r) { return fluency_value(r.fluency); });
}

}  // namespace mstyle::quality
