#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/embed/provider.hpp"
#include "mstyle/quality/aggregate.hpp"
#include "mstyle/quality/alpha.hpp"
#include "mstyle/quality/annotation.hpp"
#include "mstyle/quality/validation.hpp"

namespace mstyle::quality {

struct QualityOptions {
  std::size_t min_annotators = 3;
  double fluency_tie_threshold = 0.02;
};

struct QualityRow {
  LanguageCode language;
  GenerationMethod method = GenerationMethod::direct;
  std::size_t pairs = 0;
  std::size_t pairs_scored = 0;
  std::optional<double> presence_accuracy;
  std::optional<double> mean_fluency;
  std::optional<double> alpha_presence;
  std::optional<double> alpha_fluency;
  std::optional<double> paraphrase_similarity;
  std::optional<double> diversity;
};

struct QualityReport {
  std::vector<QualityRow> rows;  // sorted by (language, method)
  std::map<LanguageCode, GenerationMethod> selected_methods;
  std::vector<std::string> insufficient_tasks;
  std::size_t unmatched_responses = 0;
};

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json to_json(const QualityReport& r) {
  Json rows = Json::array();
  for (const auto& q : r.rows)
    rows.push_back(Json{{"language", q.language.str()},
                        {"method", to_string(q.method)},
                        {"presence_accuracy", optional_json(q.presence_accuracy)},
                        {"mean_fluency", optional_json(q.mean_fluency)},
                        {"alpha_presence", optional_json(q.alpha_presence)},
                        {"alpha_fluency", optional_json(q.alpha_fluency)},
                        {"paraphrase_similarity", optional_json(q.paraphrase_similarity)},
                        {"diversity", optional_json(q.diversity)},
                        {"pairs", q.pairs},
                        {"pairs_scored", q.pairs_scored}});
  Json selected = Json::object();
  for (const auto& [lang, m] : r.selected_methods) selected[lang.str()] = to_string(m);
  return Json{{"groups", std::move(rows)},
              {"selected_methods", std::move(selected)},
              {"insufficient_tasks", r.insufficient_tasks},
              {"unmatched_responses", r.unmatched_responses}};
}

/// Per (language, method) annotation aggregates, with the generation
/// method chosen per language where both methods were annotated. Tasks
/// below the annotator minimum are listed and left out of the scores.
/// With a provider, paraphrase similarity and diversity (pos sentences) are
/// filled in as well.
inline QualityReport aggregate_quality(const std::vector<ParallelPair>& pairs,
                                       const std::vector<AnnotationResponse>& responses,
                                       const QualityOptions& opts = {},
                                       EmbeddingProvider* provider = nullptr) {
  std::map<std::string, std::vector<const AnnotationResponse*>> by_task;
  std::set<std::pair<std::string, std::string>> seen;
  std::set<std::string> known_tasks;
  for (const auto& p : pairs)
    for (const auto& t : tasks_for_pair(p)) known_tasks.insert(t.task_id);
  QualityReport report;
  for (const auto& r : responses) {
    if (!known_tasks.count(r.task_id)) {
      ++report.unmatched_responses;
      continue;
    }
    if (!seen.insert({r.task_id, r.annotator_id}).second)
      fail(Errc::validation, "duplicate response by " + r.annotator_id + " on " + r.task_id);
    by_task[r.task_id].push_back(&r);
  }

  auto presences = [&](const std::string& task) {
    std::vector<Presence> v;
    for (const auto* r : by_task[task]) v.push_back(r->presence);
    return v;
  };
  auto fluencies = [&](const std::string& task) {
    std::vector<Fluency> v;
    for (const auto* r : by_task[task]) v.push_back(r->fluency);
    return v;
  };
  auto sufficient = [&](const std::string& task) {
    return by_task[task].size() >= std::max<std::size_t>(1, opts.min_annotators);
  };

  std::map<std::pair<LanguageCode, GenerationMethod>, std::vector<const ParallelPair*>> groups;
  for (const auto& p : pairs) groups[{p.language, p.method}].push_back(&p);

  for (const auto& [key, group] : groups) {
    QualityRow row;
    row.language = key.first;
    row.method = key.second;
    row.pairs = group.size();
    std::size_t correct = 0;
    double fluency_sum = 0.0;
    std::size_t fluency_n = 0;
    std::vector<std::string> task_ids;
    for (const auto* p : group) {
      const auto tasks = tasks_for_pair(*p);
      bool both = true;
      for (const auto& t : tasks) {
        task_ids.push_back(t.task_id);
        if (!sufficient(t.task_id)) {
          report.insufficient_tasks.push_back(t.task_id);
          both = false;
          continue;
        }
        fluency_sum += fluency_score(fluencies(t.task_id), opts.min_annotators);
        ++fluency_n;
      }
      if (!both) continue;
      const double pos = presence_score(presences(tasks[0].task_id), opts.min_annotators);
      const double neg = presence_score(presences(tasks[1].task_id), opts.min_annotators);
      correct += static_cast<std::size_t>(pair_presence_correct(pos, neg));
      ++row.pairs_scored;
    }
    if (row.pairs_scored > 0)
      row.presence_accuracy = static_cast<double>(correct) / static_cast<double>(row.pairs_scored);
    if (fluency_n > 0) row.mean_fluency = fluency_sum / static_cast<double>(fluency_n);

    auto try_alpha = [&](const AgreementInput& in) -> std::optional<double> {
      if (in.cells.size() < 2) return std::nullopt;
      try {
        return krippendorff_alpha(in).alpha;
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    row.alpha_presence = try_alpha(presence_agreement(responses, task_ids));
    row.alpha_fluency = try_alpha(fluency_agreement(responses, task_ids));

    if (provider) {
      std::vector<ParallelPair> copies;
      std::vector<std::string> pos_texts;
      for (const auto* p : group) {
        copies.push_back(*p);
        pos_texts.push_back(p->pos_text);
      }
      row.paraphrase_similarity = paraphrase_similarity(copies, *provider);
      if (pos_texts.size() >= 2) row.diversity = diversity_score(pos_texts, *provider);
    }
    report.rows.push_back(std::move(row));
  }

  std::map<LanguageCode, std::map<GenerationMethod, const QualityRow*>> by_lang;
  for (const auto& row : report.rows) by_lang[row.language][row.method] = &row;
  for (const auto& [lang, methods] : by_lang) {
    const auto d = methods.find(GenerationMethod::direct);
    const auto t = methods.find(GenerationMethod::translated);
    if (d == methods.end() || t == methods.end()) continue;
    const QualityRow& dr = *d->second;
    const QualityRow& tr = *t->second;
    if (!dr.presence_accuracy || !dr.mean_fluency || !tr.presence_accuracy || !tr.mean_fluency)
      continue;
    report.selected_methods[lang] = select_generation_method(
        {*dr.presence_accuracy, *dr.mean_fluency}, {*tr.presence_accuracy, *tr.mean_fluency},
        opts.fluency_tie_threshold);
  }
  return report;
}

}  // namespace mstyle::quality
