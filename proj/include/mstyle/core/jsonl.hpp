#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mstyle/core/error.hpp"

namespace mstyle {

using Json = nlohmann::ordered_json;

namespace io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(Errc::io, "write failed for " + path.string());
}

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_col(std::string_view text,
                                                    std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

/// Parses a JSON document; syntax errors carry line:column context.
inline Json parse_json(std::string_view text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    fail(Errc::parse, origin + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": " + e.what());
  }
}

inline Json read_json(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_file(path, j.dump(2) + "\n");
}

/// Calls fn(object, line_number) for every non-blank line of a JSONL text.
inline void for_each_jsonl(std::string_view text, const std::string& origin,
                           const std::function<void(const Json&, std::size_t)>& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (nl == text.size()) break;
      continue;
    }
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::parse, origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      fn(obj, line_no);
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::parse, origin + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (nl == text.size()) break;
  }
}

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path,
                          const std::function<T(const Json&)>& decode) {
  std::vector<T> out;
  for_each_jsonl(read_file(path), path.string(),
                 [&](const Json& j, std::size_t) { out.push_back(decode(j)); });
  return out;
}

template <typename Range, typename Encode>
std::string to_jsonl(const Range& items, Encode encode) {
  std::string out;
  for (const auto& item : items) {
    out += Json(encode(item)).dump();
    out += '\n';
  }
  return out;
}

}  // namespace io

/// Required-field accessor with a descriptive error.
template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object()) fail(Errc::parse, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) fail(Errc::parse, std::string("missing field \"") + key + "\"");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(Errc::parse, std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace mstyle
