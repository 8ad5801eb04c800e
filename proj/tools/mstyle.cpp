#include <csignal>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "mstyle/cli/commands.hpp"
#include "mstyle/cli/settings.hpp"
#include "mstyle/service/server.hpp"
#include "mstyle/service/store.hpp"

#ifndef MSTYLE_DATA_DIR
#define MSTYLE_DATA_DIR "data"
#endif

using mstyle::Errc;
using mstyle::Json;
using mstyle::cli::Settings;

namespace {

enum class Kind { text, integer, real, list };

struct Flag {
  std::string name;  // without dashes
  Kind kind;
  std::string help;
  std::string value = {};
  std::vector<std::string> values = {};
  CLI::Option* opt = nullptr;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<std::string> sections;  // config sections read after the top level
  std::vector<Flag> flags;
  std::function<mstyle::cli::CommandResult(const Settings&)> run;
  CLI::App* app = nullptr;
};

std::string key_of(const std::string& flag) {
  std::string k = flag;
  for (char& c : k)
    if (c == '-') c = '_';
  return k;
}

Json convert(const Flag& f) {
  const std::string what = "--" + f.name;
  switch (f.kind) {
    case Kind::text: return f.value;
    case Kind::list: return f.values;
    case Kind::integer: {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(f.value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      mstyle::require(used == f.value.size() && used > 0, Errc::validation,
                      what + " expects an integer, got \"" + f.value + "\"");
      if (v < 0) return v;
      return static_cast<std::uint64_t>(v);
    }
    case Kind::real: {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(f.value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      mstyle::require(used == f.value.size() && used > 0, Errc::validation,
                      what + " expects a number, got \"" + f.value + "\"");
      return v;
    }
  }
  return nullptr;
}

Settings resolve(Command& c, const Json& defaults) {
  Settings s(defaults);
  for (auto& f : c.flags)
    if (f.name == "config" && f.opt->count() > 0)
      s.overlay_config(mstyle::io::read_json(f.value), c.sections);
  for (auto& f : c.flags)
    if (f.name != "config" && f.opt->count() > 0) s.set(key_of(f.name), convert(f));
  return s;
}

void print_error(Errc code, const std::string& message) {
  std::cerr << Json{{"error", {{"code", std::string(mstyle::errc_name(code))}, {"message", message}}}}.dump()
            << std::endl;
}

std::vector<Flag> train_flags() {
  return {{"margin", Kind::real, "triplet margin"},
          {"learning-rate", Kind::real, "step size"},
          {"epochs", Kind::integer, "passes"},
          {"batch-size", Kind::integer, "triplets per step"},
          {"crosslingual-ratio", Kind::real, "share of cross-lingual triplets"},
          {"triplets-per-epoch", Kind::integer, "triplets drawn per epoch"},
          {"out-dim", Kind::integer, "projection size (0: base dim)"},
          {"init-noise", Kind::real, "initial weight noise"}};
}

std::vector<Flag> with(std::vector<Flag> a, const std::vector<Flag>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

int serve(const Settings& s) {
  const auto langs = mstyle::cli::load_languages(s);
  const auto features = mstyle::cli::load_features(s, langs);
  const auto min = s.get_or<std::size_t>("min_annotators", 3);
  mstyle::require(min >= 1, Errc::validation, "--min-annotators must be >= 1");
  mstyle::service::AnnotationStore store(s.str("data_dir"), features, langs, min);

  // Stop cleanly on SIGINT/SIGTERM; the handler thread waits for them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  httplib::Server server;
  mstyle::service::register_routes(server, store, s.str_or("ui_dir", ""));
  const std::string host = s.str_or("host", "127.0.0.1");
  const int requested = static_cast<int>(s.get_or<std::uint64_t>("port", 8080));
  const int port = requested == 0 ? server.bind_to_any_port(host) : requested;
  if (requested != 0 && !server.bind_to_port(host, port))
    mstyle::fail(Errc::io, "cannot bind " + host + ":" + std::to_string(port));
  if (port < 0) mstyle::fail(Errc::io, "cannot bind " + host);

  std::thread waiter([&server, set] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  const auto stats = store.stats();
  std::cout << Json{{"host", host}, {"port", port}, {"data_dir", s.str("data_dir")},
                    {"tasks", stats.tasks}, {"responses", stats.responses}}
                   .dump()
            << "\nlistening on http://" << host << ":" << port << std::endl;
  const bool ok = server.listen_after_bind();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : mstyle::exit_code_for(Errc::io);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual style embedding toolkit"};
  app.require_subcommand(1);

  const Json defaults{{"seed", 0}, {"features", std::string(MSTYLE_DATA_DIR) + "/feature_registry.json"}};
  namespace c = mstyle::cli;
  std::vector<Command> commands;
  commands.push_back({"build-soc", "build a STEL-or-Content benchmark from parallel pairs", {"benchmark"},
                      {{"pairs", Kind::text, "pair JSONL"},
                       {"mode", Kind::text, "multilingual | crosslingual"},
                       {"anchor-language", Kind::text, "anchor language (crosslingual)"},
                       {"anchor-polarity", Kind::text, "pos | neg"},
                       {"out", Kind::text, "benchmark JSONL to write"}},
                      c::cmd_build_soc});
  commands.push_back({"score", "score a benchmark with an embedding provider", {"benchmark"},
                      {{"benchmark", Kind::text, "benchmark JSONL"},
                       {"provider", Kind::text, "provider spec"},
                       {"tie-policy", Kind::text, "strict_fail | half_credit"},
                       {"threads", Kind::integer, "worker threads"}},
                      c::cmd_score});
  commands.push_back({"train", "train a projection with triplet loss", {"train"},
                      with({{"pairs", Kind::text, "training pair JSONL"},
                            {"provider", Kind::text, "base provider spec"},
                            {"model-out", Kind::text, "model JSON to write"},
                            {"loss-out", Kind::text, "loss trace CSV to write"},
                            {"features", Kind::text, "feature registry JSON"},
                            {"languages", Kind::text, "language registry JSON"}},
                           train_flags()),
                      c::cmd_train});
  commands.push_back({"ablate", "retrain without excluded data and report retention", {"train", "ablation"},
                      with({{"pairs", Kind::text, "training pair JSONL"},
                            {"condition", Kind::text, "ablation condition JSON"},
                            {"benchmark", Kind::list, "benchmark JSONL (repeatable)"},
                            {"provider", Kind::text, "base provider spec"},
                            {"tie-policy", Kind::text, "strict_fail | half_credit"},
                            {"threads", Kind::integer, "worker threads"},
                            {"features", Kind::text, "feature registry JSON"},
                            {"languages", Kind::text, "language registry JSON"}},
                           train_flags()),
                      c::cmd_ablate});
  commands.push_back({"aggregate", "aggregate annotation responses", {"quality"},
                      {{"pairs", Kind::text, "pair JSONL"},
                       {"responses", Kind::text, "response export JSONL"},
                       {"min-annotators", Kind::integer, "responses needed per task"},
                       {"threshold", Kind::real, "fluency gap that decides the method"},
                       {"provider", Kind::text, "provider spec for similarity metrics"}},
                      c::cmd_aggregate});
  commands.push_back({"validate-dataset", "check pairs and compute similarity metrics", {"quality"},
                      {{"pairs", Kind::text, "pair JSONL"},
                       {"provider", Kind::text, "provider spec"},
                       {"features", Kind::text, "feature registry JSON"},
                       {"languages", Kind::text, "language registry JSON"}},
                      c::cmd_validate_dataset});
  commands.push_back({"av-eval", "authorship verification by embedding similarity", {"av"},
                      {{"pairs", Kind::text, "AV pair JSONL"},
                       {"provider", Kind::text, "provider spec"},
                       {"calibration-fraction", Kind::real, "share of pairs used for the threshold"}},
                      c::cmd_av_eval});
  commands.push_back({"generate", "generate pairs with the offline template client", {"generate"},
                      {{"language", Kind::text, "language code"},
                       {"feature", Kind::text, "feature id"},
                       {"count", Kind::integer, "pairs to generate"},
                       {"topics", Kind::text, "topic list, one per line"},
                       {"attribute-pools", Kind::text, "attribute pool JSON"},
                       {"max-attempts", Kind::integer, "attempts per request"},
                       {"threads", Kind::integer, "concurrent requests"},
                       {"out", Kind::text, "pair JSONL to write"},
                       {"features", Kind::text, "feature registry JSON"},
                       {"languages", Kind::text, "language registry JSON"}},
                      c::cmd_generate});
  commands.push_back({"annotate-serve", "run the annotation HTTP service", {"service"},
                      {{"port", Kind::integer, "TCP port (0: any free port)"},
                       {"host", Kind::text, "bind address"},
                       {"data-dir", Kind::text, "journal directory"},
                       {"min-annotators", Kind::integer, "responses needed per task"},
                       {"ui-dir", Kind::text, "static UI files served under /ui/"},
                       {"features", Kind::text, "feature registry JSON"},
                       {"languages", Kind::text, "language registry JSON"}},
                      nullptr});

  for (auto& cmd : commands) {
    cmd.app = app.add_subcommand(cmd.name, cmd.help);
    for (const char* common : {"seed", "config", "report"}) {
      bool present = false;
      for (const auto& f : cmd.flags) present = present || f.name == common;
      if (!present)
        cmd.flags.push_back({common, std::string(common) == "seed" ? Kind::integer : Kind::text,
                             std::string(common) == "seed"     ? "random seed"
                             : std::string(common) == "config" ? "JSON config file"
                                                                : "JSON report to write"});
    }
    for (auto& f : cmd.flags)
      f.opt = f.kind == Kind::list ? cmd.app->add_option("--" + f.name, f.values, f.help)
                                   : cmd.app->add_option("--" + f.name, f.value, f.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(Errc::validation, e.what());
    return mstyle::exit_code_for(Errc::validation);
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      const Settings s = resolve(cmd, defaults);
      if (!cmd.run) return serve(s);
      const auto result = cmd.run(s);
      if (s.has("report"))
        mstyle::io::write_json(s.str("report"), result.report);
      else
        std::cout << result.report.dump(2) << "\n";
      std::cout << result.summary << std::endl;
      return result.exit_code;
    } catch (const mstyle::Error& e) {
      print_error(e.code(), e.what());
      return mstyle::exit_code_for(e.code());
    } catch (const std::exception& e) {
      print_error(Errc::io, e.what());
      return mstyle::exit_code_for(Errc::io);
    }
  }
  return 0;
}
