#pragma once

#include <array>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/core/language.hpp"
#include "mstyle/core/parallel_pair.hpp"

namespace mstyle::quality {

enum class Presence { yes, possibly, no };
enum class Fluency { fluent, mostly_fluent, mostly_disfluent, disfluent };
enum class Side { pos, neg };

inline std::string to_string(Presence p) {
  switch (p) {
    case Presence::yes: return "yes";
    case Presence::possibly: return "possibly";
    case Presence::no: return "no";
  }
  return "no";
}

inline std::string to_string(Fluency f) {
  switch (f) {
    case Fluency::fluent: return "fluent";
    case Fluency::mostly_fluent: return "mostly_fluent";
    case Fluency::mostly_disfluent: return "mostly_disfluent";
    case Fluency::disfluent: return "disfluent";
  }
  return "disfluent";
}

inline std::string to_string(Side s) { return s == Side::pos ? "pos" : "neg"; }

inline Presence parse_presence(const std::string& s) {
  if (s == "yes") return Presence::yes;
  if (s == "possibly") return Presence::possibly;
  if (s == "no") return Presence::no;
  fail(Errc::validation, "invalid presence \"" + s + "\"; expected one of {yes, possibly, no}");
}

inline Fluency parse_fluency(const std::string& s) {
  if (s == "fluent") return Fluency::fluent;
  if (s == "mostly_fluent") return Fluency::mostly_fluent;
  if (s == "mostly_disfluent") return Fluency::mostly_disfluent;
  if (s == "disfluent") return Fluency::disfluent;
  fail(Errc::validation,
       "invalid fluency \"" + s +
           "\"; expected one of {fluent, mostly_fluent, mostly_disfluent, disfluent}");
}

inline Side parse_side(const std::string& s) {
  if (s == "pos") return Side::pos;
  if (s == "neg") return Side::neg;
  fail(Errc::validation, "invalid side \"" + s + "\"; expected pos or neg");
}

/// UTC instant formatted as YYYY-MM-DDTHH:MM:SSZ.
inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct AnnotationResponse {
  std::string task_id;
  std::string annotator_id;
  Presence presence = Presence::no;
  Fluency fluency = Fluency::disfluent;
  std::string timestamp;

  bool operator==(const AnnotationResponse&) const = default;
};

inline void to_json(Json& j, const AnnotationResponse& r) {
  j = Json{{"task_id", r.task_id},
           {"annotator_id", r.annotator_id},
           {"presence", to_string(r.presence)},
           {"fluency", to_string(r.fluency)},
           {"timestamp", r.timestamp}};
}

inline AnnotationResponse response_from_json(const Json& j) {
  AnnotationResponse r;
  r.task_id = field<std::string>(j, "task_id");
  r.annotator_id = field<std::string>(j, "annotator_id");
  r.presence = parse_presence(field<std::string>(j, "presence"));
  r.fluency = parse_fluency(field<std::string>(j, "fluency"));
  r.timestamp = j.contains("timestamp") ? field<std::string>(j, "timestamp") : std::string();
  require(!r.task_id.empty(), Errc::validation, "response with empty task_id");
  require(!r.annotator_id.empty(), Errc::validation, "response with empty annotator_id");
  return r;
}

inline std::vector<AnnotationResponse> read_responses(const std::filesystem::path& path) {
  return io::read_jsonl<AnnotationResponse>(path, response_from_json);
}

struct AnnotationTask {
  std::string task_id;
  std::string pair_id;
  Side side = Side::pos;
  std::string text;
  LanguageCode language;
  std::string feature;

  bool operator==(const AnnotationTask&) const = default;
};

inline void to_json(Json& j, const AnnotationTask& t) {
  j = Json{{"task_id", t.task_id},   {"pair_id", t.pair_id},
           {"side", to_string(t.side)}, {"text", t.text},
           {"language", t.language.str()}, {"feature", t.feature}};
}

inline AnnotationTask task_from_json(const Json& j) {
  AnnotationTask t;
  t.task_id = field<std::string>(j, "task_id");
  t.pair_id = field<std::string>(j, "pair_id");
  t.side = parse_side(field<std::string>(j, "side"));
  t.text = field<std::string>(j, "text");
  t.language = LanguageCode(field<std::string>(j, "language"));
  t.feature = field<std::string>(j, "feature");
  return t;
}

inline std::string task_id_for(const std::string& pair_id, Side side) {
  return pair_id + ":" + to_string(side);
}

/// The two annotation tasks (pos side, neg side) of a pair.
inline std::array<AnnotationTask, 2> tasks_for_pair(const ParallelPair& p) {
  return {AnnotationTask{task_id_for(p.pair_id, Side::pos), p.pair_id, Side::pos, p.pos_text,
                         p.language, p.feature},
          AnnotationTask{task_id_for(p.pair_id, Side::neg), p.pair_id, Side::neg, p.neg_text,
                         p.language, p.feature}};
}

}  // namespace mstyle::quality
