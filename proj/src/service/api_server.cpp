// Copyright 2026 The iotsam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "iotsam/service/api_server.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "httplib.h"

#include "iotsam/assessment/report.hpp"
#include "iotsam/filter/filter.hpp"
#include "iotsam/model/document.hpp"
#include "iotsam/store/campaign_store.hpp"

namespace iotsam::service {

using json_io::Json;
using json_io::ObjectReader;

std::pair<std::string, int> parse_listen(std::string_view text) {
  auto colon = text.rfind(':');
  int port = -1;
  if (colon != std::string_view::npos && colon > 0) {
    auto digits = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) port = -1;
  }
  if (port < 0 || port > 65535) {
    throw Error(ErrorCode::Precondition, "listen address must be host:port, got '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, colon)), port};
}

ManualSubmission manual_submission_from_json(const Json& node, const Clock& clock) {
  ObjectReader r(node, "");
  ManualSubmission s;
  s.plan_entry_id = r.nonempty("plan-entry-id");
  s.assessor_id = r.nonempty("assessor-id");
  const std::string steps_path = r.path_of("step-observations");
  const Json& steps = r.array("step-observations");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string p = json_io::join_path(steps_path, i);
    const Json& list = json_io::as_array(steps[i], p);
    std::vector<harness::Observation> observations;
    for (std::size_t j = 0; j < list.size(); ++j) {
      const std::string op = json_io::join_path(p, j);
      if (list[j].is_string()) {
        observations.push_back(harness::text_observation(list[j].get<std::string>(), clock()));
      } else {
        observations.push_back(harness::observation_from_json(list[j], op));
      }
    }
    s.step_observations.push_back(std::move(observations));
  }
  s.outcome = r.enumeration<harness::Outcome>("outcome");
  s.rationale = r.string("rationale");
  r.finish();
  return s;
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::WrongState:
    case ErrorCode::DuplicateEntry: return 409;
    case ErrorCode::CorruptLog:
    case ErrorCode::Io: return 500;
    default: return 400;
  }
}

namespace {

constexpr const char* kJson = "application/json";

std::string correlation_id() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint32_t salt = std::random_device{}();
  char buf[32];
  std::snprintf(buf, sizeof buf, "err-%08x-%06llu", salt, static_cast<unsigned long long>(++counter));
  return buf;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(json_io::canonical(body), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                const std::string& path = {}) {
  Json body = Json::object();
  body["status"] = status;
  body["code"] = std::string(code);
  body["message"] = message;
  if (!path.empty()) body["path"] = path;
  if (status >= 500) {
    std::string id = correlation_id();
    body["correlation-id"] = id;
    std::fprintf(stderr, "iotsam serve: %s: %s\n", id.c_str(), message.c_str());
  }
  send_json(res, status, body);
}

Json session_summary(const store::Session& s) {
  Json node = Json::object();
  node["session-id"] = s.session_id;
  node["state"] = std::string(model::to_token(s.state));
  node["device-id"] = s.device.device_id;
  node["profile-id"] = s.profile.profile_id;
  node["catalog-id"] = s.catalog.catalog_id;
  node["catalog-version"] = s.catalog.version;
  node["plan-id"] = s.plan.plan_id;
  node["entries"] = s.plan.entries.size();
  node["protocols"] = s.protocols.size();
  node["pending-automated"] = s.pending_automated().size();
  node["pending-manual"] = s.pending_manual().size();
  node["all-covered"] = s.all_covered();
  node["coverage"] = filter::to_json(filter::coverage_report(s.plan));
  if (s.verdict) {
    node["result"] = std::string(model::to_token(s.verdict->result));
  } else {
    node["result"] = nullptr;
  }
  return node;
}

std::string part_text(const httplib::Request& req, const std::string& name) {
  if (req.has_file(name)) return req.get_file_value(name).content;
  if (req.has_param(name)) return req.get_param_value(name);
  return {};
}

}  // namespace

struct ApiServer::Impl {
  ServiceOptions options;
  harness::ExecutorRegistry registry;
  store::CampaignStore store;
  httplib::Server server;
  std::thread thread;
  bool bound = false;
  int bound_port = 0;
  std::mutex running_mutex;
  std::set<std::string> running;  // sessions with an active automated run

  Impl(ServiceOptions o, harness::ExecutorRegistry r)
      : options(std::move(o)), registry(std::move(r)), store(options.store_root, options.harness.clock) {
    routes();
  }

  template <typename Handler>
  auto guarded(Handler handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, http_status_for(e.code()), code_name(e.code()), e.message(), e.path());
      } catch (const std::exception& e) {
        send_error(res, 500, "INTERNAL", e.what());
      }
    };
  }

  std::string prefixed(std::string_view suffix) const { return std::string(kApiPrefix) + std::string(suffix); }

  void routes() {
    server.Get(prefixed("/sessions"), guarded([this](const httplib::Request&, httplib::Response& res) {
      Json list = Json::array();
      for (const auto& id : store.list_sessions()) list.push_back(session_summary(store.load_session(id)));
      send_json(res, 200, Json{{"sessions", std::move(list)}});
    }));

    server.Post(prefixed("/sessions"), guarded([this](const httplib::Request& req, httplib::Response& res) {
      create_session(req, res);
    }));

    server.Get(prefixed(R"(/sessions/([^/]+))"), guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, session_summary(store.load_session(req.matches[1])));
    }));

    server.Get(prefixed(R"(/sessions/([^/]+)/plan)"),
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(filter::serialize_plan(store.load_session(req.matches[1]).plan), kJson);
               }));

    server.Get(prefixed(R"(/sessions/([^/]+)/protocols)"),
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 Json list = Json::array();
                 for (const auto& p : store.load_session(req.matches[1]).protocols) list.push_back(harness::to_json(p));
                 send_json(res, 200, Json{{"protocols", std::move(list)}});
               }));

    server.Get(prefixed(R"(/sessions/([^/]+)/pending-manual)"),
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto session = store.load_session(req.matches[1]);
                 Json list = Json::array();
                 for (const auto& e : session.pending_manual()) list.push_back(filter::planned_test_to_json(e));
                 send_json(res, 200, Json{{"session-id", session.session_id}, {"entries", std::move(list)}});
               }));

    server.Post(prefixed(R"(/sessions/([^/]+)/execute-automated)"),
                guarded([this](const httplib::Request& req, httplib::Response& res) { execute(req, res); }));

    server.Post(prefixed(R"(/sessions/([^/]+)/entries/([^/]+)/assist)"),
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto session = store.load_session(req.matches[1]);
                  const auto* entry = session.plan.find(req.matches[2].str());
                  if (entry == nullptr) throw Error(ErrorCode::NotFound, "no plan entry '" + req.matches[2].str() + "'");
                  Json list = Json::array();
                  for (const auto& o : harness::collect_assist_observations(session.plan, *entry, registry, options.harness)) {
                    list.push_back(harness::to_json(o));
                  }
                  send_json(res, 200, Json{{"observations", std::move(list)}});
                }));

    server.Post(prefixed(R"(/sessions/([^/]+)/manual-results)"),
                guarded([this](const httplib::Request& req, httplib::Response& res) { manual(req, res); }));

    server.Post(prefixed(R"(/sessions/([^/]+)/assess)"),
                guarded([this](const httplib::Request& req, httplib::Response& res) { assess(req, res); }));

    server.Get(prefixed(R"(/sessions/([^/]+)/report)"),
               guarded([this](const httplib::Request& req, httplib::Response& res) { report(req, res); }));

    server.Get(prefixed("/executors"), guarded([this](const httplib::Request&, httplib::Response& res) {
      Json list = Json::array();
      for (const auto& d : registry.list()) list.push_back(harness::to_json(d));
      send_json(res, 200, Json{{"executors", std::move(list)}});
    }));

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 404) {
        send_error(res, 404, "NOT_FOUND", "no route for " + req.method + " " + req.path);
      } else if (res.status >= 400) {
        send_error(res, res.status, res.status >= 500 ? "INTERNAL" : "BAD_REQUEST", "request failed");
      }
    });
    if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    std::string device_text, profile_text, catalog_text, plan_text;
    if (req.is_multipart_form_data()) {
      device_text = part_text(req, "device-model");
      profile_text = part_text(req, "testing-profile");
      catalog_text = part_text(req, "test-catalog");
      plan_text = part_text(req, "test-plan");
    } else {
      Json body = json_io::parse_text(req.body);
      ObjectReader r(body, "");
      device_text = json_io::canonical(r.required("device-model"));
      profile_text = json_io::canonical(r.required("testing-profile"));
      catalog_text = json_io::canonical(r.required("test-catalog"));
      if (const Json* plan = r.optional("test-plan")) plan_text = json_io::canonical(*plan);
      r.finish();
    }
    auto need = [](const std::string& text, std::string_view part) {
      if (text.empty()) throw Error(ErrorCode::Schema, "missing part '" + std::string(part) + "'", "/" + std::string(part));
    };
    need(device_text, "device-model");
    need(profile_text, "testing-profile");
    need(catalog_text, "test-catalog");
    auto device = model::parse_as<model::DeviceModel>(device_text);
    auto profile = model::parse_as<model::TestingProfile>(profile_text);
    auto catalog = model::parse_as<model::TestCaseCatalog>(catalog_text);
    auto plan = plan_text.empty() ? filter::filter_catalog(catalog, device, profile, options.harness.clock)
                                  : filter::parse_plan(plan_text);
    const std::string id = store.create_session(device, profile, catalog, plan);
    res.set_header("Location", prefixed("/sessions/" + id));
    send_json(res, 201, session_summary(store.load_session(id)));
  }

  void execute(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto session = store.load_session(id);
    if (session.state == store::SessionState::Assessed) {
      throw Error(ErrorCode::WrongState, "session " + id + " is already assessed");
    }
    {
      std::lock_guard lock(running_mutex);
      if (!running.insert(id).second) throw Error(ErrorCode::WrongState, "an automated run is already active for " + id);
    }
    try {
      if (session.state == store::SessionState::Planned) store.begin_execution(id);
    } catch (...) {
      std::lock_guard lock(running_mutex);
      running.erase(id);
      throw;
    }
    filter::TestPlan pending = session.plan;
    pending.entries = session.pending_automated();

    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, id, pending](std::size_t, httplib::DataSink& sink) {
          auto emit = [&sink](std::string_view event, const Json& data) {
            std::string frame = "event: " + std::string(event) + "\ndata: " + data.dump() + "\n\n";
            if (sink.is_writable()) sink.write(frame.data(), frame.size());
          };
          emit("started", Json{{"session-id", id}, {"automated", pending.entries.size()}});
          try {
            harness::execute_plan(
                pending, registry,
                [&](const harness::ExecutionProtocol& p) {
                  store.append_protocol(id, p);
                  emit("protocol", Json{{"plan-entry-id", p.plan_entry_id},
                                        {"case-id", p.case_id},
                                        {"protocol-id", p.protocol_id},
                                        {"outcome", std::string(model::to_token(p.outcome))}});
                },
                options.parallelism, options.harness);
            auto after = store.load_session(id);
            emit("done", session_summary(after));
          } catch (const Error& e) {
            emit("error", Json{{"code", std::string(code_name(e.code()))}, {"message", e.message()}});
          } catch (const std::exception& e) {
            emit("error", Json{{"code", "INTERNAL"}, {"message", e.what()}});
          }
          sink.done();
          return true;
        },
        [this, id](bool) {
          std::lock_guard lock(running_mutex);
          running.erase(id);
        });
  }

  void manual(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto submission = manual_submission_from_json(json_io::parse_text(req.body), options.harness.clock);
    auto session = store.load_session(id);
    const auto* entry = session.plan.find(submission.plan_entry_id);
    if (entry == nullptr) {
      throw Error(ErrorCode::NotFound, "no plan entry '" + submission.plan_entry_id + "' in session " + id);
    }
    auto protocol = harness::record_manual_result(session.plan, *entry, submission.assessor_id,
                                                  std::move(submission.step_observations), submission.outcome,
                                                  std::move(submission.rationale), options.harness.clock);
    store.append_protocol(id, protocol);
    res.status = 201;
    res.set_content(harness::serialize_protocol(protocol), kJson);
  }

  void assess(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::optional<model::AssessmentScheme> scheme;
    if (!req.body.empty()) scheme = model::parse_as<model::AssessmentScheme>(req.body);
    if (req.has_param("scheme-id")) {
      const std::string wanted = req.get_param_value("scheme-id");
      if (scheme && scheme->scheme_id != wanted) {
        throw Error(ErrorCode::Schema, "scheme-id parameter disagrees with the supplied scheme");
      }
      if (!scheme) {
        for (const auto& s : options.schemes) {
          if (s.scheme_id == wanted) scheme = s;
        }
        if (!scheme) throw Error(ErrorCode::NotFound, "no scheme '" + wanted + "' configured");
      }
    }
    if (!scheme) {
      if (options.schemes.size() != 1) {
        throw Error(ErrorCode::Schema, "choose a scheme with ?scheme-id= or send one in the body");
      }
      scheme = options.schemes.front();
    }
    auto verdict = store.assess(id, *scheme);
    res.set_content(assessment::serialize_verdict(verdict), kJson);
  }

  void report(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const std::string format = req.has_param("format") ? req.get_param_value("format") : "machine";
    if (format != "machine" && format != "text") {
      throw Error(ErrorCode::Schema, "format must be machine or text");
    }
    auto session = store.load_session(id);
    if (!session.verdict) throw Error(ErrorCode::WrongState, "session " + id + " is not assessed yet");
    auto rendered = assessment::render_report(session.plan, session.protocols, session.verdict->case_verdicts,
                                              *session.verdict);
    if (format == "text") {
      res.set_content(assessment::report_text(rendered), "text/plain; charset=utf-8");
    } else {
      res.set_content(assessment::serialize_report(rendered), kJson);
    }
  }
};

ApiServer::ApiServer(ServiceOptions options, harness::ExecutorRegistry registry)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(registry))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind() {
  if (impl_->bound) return impl_->bound_port;
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(o.host);
    if (impl_->bound_port <= 0) throw Error(ErrorCode::Io, "cannot bind " + o.host);
  } else {
    if (!impl_->server.bind_to_port(o.host, o.port)) {
      throw Error(ErrorCode::Io, "cannot bind " + o.host + ":" + std::to_string(o.port));
    }
    impl_->bound_port = o.port;
  }
  impl_->bound = true;
  return impl_->bound_port;
}

void ApiServer::listen() {
  bind();
  impl_->server.listen_after_bind();
}

int ApiServer::start() {
  int port = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace iotsam::service
