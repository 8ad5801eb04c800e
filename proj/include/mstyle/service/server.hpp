#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include <httplib.h>

#include "mstyle/core/error.hpp"
#include "mstyle/core/jsonl.hpp"
#include "mstyle/service/store.hpp"

namespace mstyle::service {

inline int http_status_for(Errc c) {
  switch (c) {
    case Errc::not_found:
    case Errc::lookup: return 404;
    case Errc::conflict: return 409;
    case Errc::io: return 500;
    default: return 400;
  }
}

inline Json error_body(Errc c, const std::string& message) {
  return Json{{"error", {{"code", std::string(errc_name(c))}, {"message", message}}}};
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler, turning errors into JSON error responses.
inline httplib::Server::Handler guarded(
    std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_json(res, http_status_for(e.code()), error_body(e.code(), e.what()));
    } catch (const Json::exception& e) {
      send_json(res, 400, error_body(Errc::parse, e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, error_body(Errc::io, e.what()));
    }
  };
}

inline std::string param(const httplib::Request& req, const char* name, bool required) {
  if (req.has_param(name)) return req.get_param_value(name);
  if (required) fail(Errc::validation, std::string("missing query parameter \"") + name + "\"");
  return {};
}

}  // namespace detail

/// Registers the annotation endpoints on `server`. `ui_dir`, when it exists,
/// is served under /ui/.
inline void register_routes(httplib::Server& server, AnnotationStore& store,
                            const std::filesystem::path& ui_dir = {}) {
  using detail::guarded;
  using detail::send_json;

  server.Post("/api/pairs/import", guarded([&store](const auto& req, auto& res) {
                const Json body = io::parse_json(req.body, "request body");
                const auto created = store.import_pairs_file(field<std::string>(body, "path"));
                send_json(res, 200, Json{{"tasks_created", created}});
              }));

  server.Get("/api/tasks/next", guarded([&store](const auto& req, auto& res) {
               const auto a = store.next_task(detail::param(req, "annotator", true),
                                              detail::param(req, "language", true));
               if (!a) {
                 res.status = 204;
                 return;
               }
               send_json(res, 200, to_json(*a));
             }));

  server.Post("/api/responses", guarded([&store](const auto& req, auto& res) {
                const Json body = io::parse_json(req.body, "request body");
                const auto count = store.submit(quality::response_from_json(body));
                send_json(res, 200, Json{{"count", count}});
              }));

  server.Get("/api/export", guarded([&store](const auto& req, auto& res) {
               const auto rows = store.export_responses(detail::param(req, "language", false),
                                                        detail::param(req, "feature", false));
               res.status = 200;
               res.set_content(io::to_jsonl(rows, [](const auto& r) { return Json(r); }),
                               "application/x-ndjson");
             }));

  server.Get("/api/stats", guarded([&store](const auto&, auto& res) {
               send_json(res, 200, to_json(store.stats()));
             }));

  server.Get("/api/languages", guarded([&store](const auto&, auto& res) {
               send_json(res, 200, store.languages().to_json());
             }));

  if (!ui_dir.empty() && std::filesystem::is_directory(ui_dir))
    server.set_mount_point("/ui", ui_dir.string());
}

}  // namespace mstyle::service
