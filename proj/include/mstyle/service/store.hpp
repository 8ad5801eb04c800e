#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/feature_registry.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/parallel_pair.hpp"
#include "mstyle/quality/annotation.hpp"

namespace mstyle::service {

using quality::AnnotationResponse;
using quality::AnnotationTask;

/// Append-only JSONL file. Every append is written with one write() call and
/// fsync'd before returning.
class Journal {
 public:
  Journal() = default;
  explicit Journal(const std::filesystem::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) fail(Errc::io, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;
  Journal(Journal&& o) noexcept : path_(std::move(o.path_)), fd_(o.fd_) { o.fd_ = -1; }
  Journal& operator=(Journal&& o) noexcept {
    if (this != &o) {
      close();
      path_ = std::move(o.path_);
      fd_ = o.fd_;
      o.fd_ = -1;
    }
    return *this;
  }
  ~Journal() { close(); }

  void append(const std::string& lines) {
    std::size_t done = 0;
    while (done < lines.size()) {
      const ssize_t n = ::write(fd_, lines.data() + done, lines.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(Errc::io, "write to " + path_.string() + " failed: " + std::strerror(errno));
      }
      done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0)
      fail(Errc::io, "fsync of " + path_.string() + " failed: " + std::strerror(errno));
  }

 private:
  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

  std::filesystem::path path_;
  int fd_ = -1;
};

/// Reads a journal, dropping a torn final line (no trailing newline, or
/// unparseable) and truncating the file back to the last complete record so
/// later appends start on a clean line.
inline std::vector<Json> recover_journal(const std::filesystem::path& path) {
  std::vector<Json> out;
  if (!std::filesystem::exists(path)) return out;
  const std::string text = io::read_file(path);
  std::size_t pos = 0, good_end = 0, line_no = 0;
  for (std::size_t nl; (nl = text.find('\n', pos)) != std::string::npos; pos = nl + 1) {
    ++line_no;
    const std::string_view line(text.data() + pos, nl - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(Json::parse(line));
      } catch (const Json::parse_error&) {
        // Only the final record may be damaged by a crash.
        if (nl + 1 < text.size())
          fail(Errc::parse,
               path.string() + ":" + std::to_string(line_no) + ": corrupt journal record");
        break;
      }
    }
    good_end = nl + 1;
  }
  if (good_end < text.size()) std::filesystem::resize_file(path, good_end);
  return out;
}

struct TaskAssignment {
  AnnotationTask task;
  std::string feature_name;
  std::string feature_definition;
  std::size_t remaining_for_annotator = 0;  // tasks still open to this annotator, this one included
};

inline Json to_json(const TaskAssignment& a) {
  return Json{{"task", Json(a.task)},
              {"feature_name", a.feature_name},
              {"feature_definition", a.feature_definition},
              {"remaining_for_annotator", a.remaining_for_annotator}};
}

struct StoreStats {
  std::size_t tasks = 0;
  std::size_t responses = 0;
  std::size_t tasks_with_min_annotations = 0;
};

inline Json to_json(const StoreStats& s) {
  return Json{{"tasks", s.tasks},
              {"responses", s.responses},
              {"tasks_with_min_annotations", s.tasks_with_min_annotations}};
}

/// Annotation tasks and responses backed by tasks.jsonl and responses.jsonl
/// in a data directory, with the in-memory index rebuilt on open.
///
/// Writers are serialized; readers share a lock. A call that returns has
/// its records on disk.
class AnnotationStore {
 public:
  AnnotationStore(const std::filesystem::path& data_dir, FeatureRegistry features,
                  LanguageRegistry languages, std::size_t min_annotators = 3)
      : dir_(data_dir),
        features_(std::move(features)),
        languages_(std::move(languages)),
        min_annotators_(min_annotators) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(Errc::io, "cannot create data dir " + dir_.string() + ": " + ec.message());
    for (const auto& j : recover_journal(dir_ / "tasks.jsonl")) index_task(quality::task_from_json(j));
    for (const auto& j : recover_journal(dir_ / "responses.jsonl"))
      index_response(quality::response_from_json(j));
    tasks_journal_ = Journal(dir_ / "tasks.jsonl");
    responses_journal_ = Journal(dir_ / "responses.jsonl");
  }

  const LanguageRegistry& languages() const { return languages_; }
  const FeatureRegistry& features() const { return features_; }
  std::size_t min_annotators() const { return min_annotators_; }

  /// Two tasks per pair; tasks already present are skipped. The whole file
  /// is parsed and validated before anything is written.
  std::size_t import_pairs(const std::vector<ParallelPair>& pairs) {
    validate_pairs(pairs, features_, languages_);
    std::unique_lock lock(mu_);
    std::vector<AnnotationTask> fresh;
    for (const auto& p : pairs)
      for (auto& t : quality::tasks_for_pair(p))
        if (!tasks_.count(t.task_id)) fresh.push_back(std::move(t));
    if (fresh.empty()) return 0;
    std::string lines;
    for (const auto& t : fresh) lines += Json(t).dump() + "\n";
    tasks_journal_.append(lines);
    for (auto& t : fresh) index_task(std::move(t));
    return fresh.size();
  }

  std::size_t import_pairs_file(const std::filesystem::path& path) {
    return import_pairs(read_pairs(path));
  }

  /// Least-annotated open task in `language` the annotator has not answered,
  /// ties by task_id.
  std::optional<TaskAssignment> next_task(const std::string& annotator_id,
                                          const std::string& language) const {
    require(!annotator_id.empty(), Errc::validation, "annotator id must not be empty");
    const LanguageCode lang(language);
    require(languages_.contains(lang), Errc::validation,
            "unknown language \"" + language + "\"");
    std::shared_lock lock(mu_);
    const TaskRecord* best = nullptr;
    std::size_t open = 0;
    const auto it = by_language_.find(lang);
    if (it == by_language_.end()) return std::nullopt;
    for (const auto* rec : it->second) {
      if (rec->annotators.count(annotator_id)) continue;
      ++open;
      if (!best || rec->annotators.size() < best->annotators.size()) best = rec;
    }
    if (!best) return std::nullopt;
    TaskAssignment a;
    a.task = best->task;
    const auto& f = features_.get(best->task.feature);
    a.feature_name = f.name;
    a.feature_definition = f.definition;
    a.remaining_for_annotator = open;
    return a;
  }

  /// Appends the response; returns the task's response count afterwards.
  std::size_t submit(AnnotationResponse r) {
    require(!r.annotator_id.empty(), Errc::validation, "annotator id must not be empty");
    if (r.timestamp.empty()) r.timestamp = quality::utc_now();
    std::unique_lock lock(mu_);
    const auto it = tasks_.find(r.task_id);
    if (it == tasks_.end()) fail(Errc::not_found, "unknown task \"" + r.task_id + "\"");
    if (it->second.annotators.count(r.annotator_id))
      fail(Errc::conflict,
           "annotator " + r.annotator_id + " already answered task " + r.task_id);
    responses_journal_.append(Json(r).dump() + "\n");
    index_response(std::move(r));
    return it->second.annotators.size();
  }

  /// Responses sorted by (task_id, annotator_id), optionally filtered.
  std::vector<AnnotationResponse> export_responses(const std::string& language = "",
                                                   const std::string& feature = "") const {
    std::shared_lock lock(mu_);
    std::vector<AnnotationResponse> out;
    for (const auto& r : responses_) {
      const auto& t = tasks_.at(r.task_id).task;
      if (!language.empty() && t.language.str() != language) continue;
      if (!feature.empty() && t.feature != feature) continue;
      out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.task_id, a.annotator_id) < std::tie(b.task_id, b.annotator_id);
    });
    return out;
  }

  std::vector<AnnotationTask> tasks() const {
    std::shared_lock lock(mu_);
    std::vector<AnnotationTask> out;
    for (const auto& [_, rec] : tasks_) out.push_back(rec.task);
    return out;
  }

  StoreStats stats() const {
    std::shared_lock lock(mu_);
    StoreStats s;
    s.tasks = tasks_.size();
    s.responses = responses_.size();
    for (const auto& [_, rec] : tasks_)
      s.tasks_with_min_annotations += rec.annotators.size() >= min_annotators_;
    return s;
  }

 private:
  struct TaskRecord {
    AnnotationTask task;
    std::set<std::string> annotators;
  };

  void index_task(AnnotationTask t) {
    const auto id = t.task_id;
    auto [it, inserted] = tasks_.emplace(id, TaskRecord{std::move(t), {}});
    if (!inserted) return;
    auto& list = by_language_[it->second.task.language];
    // Keep the per-language list in task_id order.
    const auto pos = std::lower_bound(list.begin(), list.end(), id,
                                      [](const TaskRecord* r, const std::string& k) {
                                        return r->task.task_id < k;
                                      });
    list.insert(pos, &it->second);
  }

  void index_response(AnnotationResponse r) {
    const auto it = tasks_.find(r.task_id);
    if (it == tasks_.end())
      fail(Errc::not_found, "journal response for unknown task \"" + r.task_id + "\"");
    if (!it->second.annotators.insert(r.annotator_id).second) return;
    responses_.push_back(std::move(r));
  }

  std::filesystem::path dir_;
  FeatureRegistry features_;
  LanguageRegistry languages_;
  std::size_t min_annotators_;

  mutable std::shared_mutex mu_;
  std::map<std::string, TaskRecord> tasks_;
  std::map<LanguageCode, std::vector<const TaskRecord*>> by_language_;
  std::vector<AnnotationResponse> responses_;
  Journal tasks_journal_;
  Journal responses_journal_;
};

}  // namespace mstyle::service
