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

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "interactive.hpp"
#include "iotsam/assessment/report.hpp"
#include "iotsam/filter/filter.hpp"
#include "iotsam/model/document.hpp"
#include "iotsam/probes/probes.hpp"
#include "iotsam/service/api_server.hpp"
#include "iotsam/store/campaign_store.hpp"
#include "iotsam/store/documents.hpp"

namespace {

namespace fs = std::filesystem;
using namespace iotsam;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInsecure = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A document error tagged with the file it came from.
struct FileError : std::runtime_error {
  FileError(const std::string& file, const Error& error)
      : std::runtime_error(file + (error.path().empty() ? "" : ":" + error.path()) + ": " +
                           std::string(code_name(error.code())) + ": " + error.message()) {}
};

std::string read_input(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError("no such file: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename T, typename Parse>
T load_with(const std::string& path, Parse parse) {
  std::string bytes = read_input(path);
  try {
    return parse(bytes);
  } catch (const Error& e) {
    throw FileError(path, e);
  }
}

template <typename T>
T load(const std::string& path) {
  return load_with<T>(path, [](const std::string& b) { return model::parse_as<T>(b); });
}

void write_output(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
}

std::string default_assessor() {
  if (const char* user = std::getenv("USER"); user != nullptr && *user != '\0') return user;
  return "assessor";
}

harness::HarnessOptions harness_options(const std::optional<double>& timeout_seconds) {
  harness::HarnessOptions o;
  if (timeout_seconds) {
    if (*timeout_seconds <= 0) throw UsageError("--probe-timeout must be positive");
    o.default_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(*timeout_seconds * 1000));
  }
  return o;
}

harness::ExecutorRegistry bundled_registry() {
  harness::ExecutorRegistry registry;
  probes::register_network_probes(registry);
  return registry;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> files;
};

int cmd_validate(const ValidateArgs& a) {
  if (a.files.empty()) throw UsageError("validate needs at least one file");
  bool missing = false;
  bool invalid = false;
  for (const auto& file : a.files) {
    std::string bytes;
    try {
      bytes = read_input(file);
    } catch (const UsageError& e) {
      std::cout << "MISSING " << file << "\n";
      missing = true;
      continue;
    }
    try {
      std::string kind = store::validate_document(bytes);
      std::cout << "OK      " << file << " (" << kind << ")\n";
    } catch (const Error& e) {
      std::cout << "INVALID " << FileError(file, e).what() << "\n";
      invalid = true;
    }
  }
  return missing ? kExitUsage : invalid ? kExitError : kExitOk;
}

struct PlanArgs {
  std::string device, profile, catalog;
  std::optional<std::string> out;
};

int cmd_plan(const PlanArgs& a) {
  auto device = load<model::DeviceModel>(a.device);
  auto profile = load<model::TestingProfile>(a.profile);
  auto catalog = load<model::TestCaseCatalog>(a.catalog);
  auto plan = filter::filter_catalog(catalog, device, profile);
  std::ostream& info = a.out ? std::cout : std::cerr;
  if (a.out) {
    write_output(*a.out, filter::serialize_plan(plan));
  } else {
    std::cout << filter::serialize_plan(plan);
  }
  info << "plan " << plan.plan_id << ": " << plan.entries.size() << " entries from " << catalog.cases.size()
       << " catalog cases\n";
  if (plan.entries.empty()) std::cerr << "warning: no test case applies; the plan is empty\n";
  info << filter::coverage_text(filter::coverage_report(plan));
  return kExitOk;
}

struct RunArgs {
  std::optional<std::string> store;
  std::optional<std::string> session_id;
  std::optional<std::string> plan, device, profile, catalog;
  bool interactive = false;
  bool assist = false;
  std::size_t parallelism = 4;
  std::string assessor = default_assessor();
  std::optional<double> probe_timeout;
};

std::string create_session_from_files(store::CampaignStore& store, const RunArgs& a) {
  if (!a.device || !a.profile || !a.catalog) {
    throw UsageError("run needs --session-id, or --device, --profile and --catalog (with optional --plan)");
  }
  auto device = load<model::DeviceModel>(*a.device);
  auto profile = load<model::TestingProfile>(*a.profile);
  auto catalog = load<model::TestCaseCatalog>(*a.catalog);
  auto plan = a.plan ? load_with<filter::TestPlan>(*a.plan, [](const std::string& b) { return filter::parse_plan(b); })
                     : filter::filter_catalog(catalog, device, profile);
  return store.create_session(device, profile, catalog, plan);
}

int cmd_run(const RunArgs& a) {
  if (a.parallelism < 1) throw UsageError("--parallelism must be at least 1");
  if (a.session_id && (a.plan || a.device || a.profile || a.catalog)) {
    throw UsageError("--session-id resumes a session; do not combine it with input documents");
  }
  store::CampaignStore store(store::CampaignStore::resolve_root(a.store));
  const std::string id = a.session_id ? *a.session_id : create_session_from_files(store, a);
  std::cout << "session: " << id << "\n";

  auto session = store.load_session(id);
  if (session.state == store::SessionState::Assessed) {
    throw Error(ErrorCode::WrongState, "session " + id + " is already assessed; start a new session to re-run");
  }
  if (session.state == store::SessionState::Planned) store.begin_execution(id);

  const auto registry = bundled_registry();
  const auto options = harness_options(a.probe_timeout);
  filter::TestPlan automated = session.plan;
  automated.entries = session.pending_automated();
  std::cout << "running " << automated.entries.size() << " automated entries\n";
  harness::execute_plan(
      automated, registry,
      [&](const harness::ExecutionProtocol& p) {
        store.append_protocol(id, p);
        std::cout << "  " << model::to_token(p.outcome) << "  " << p.plan_entry_id << "  " << p.rationale << "\n"
                  << std::flush;
      },
      a.parallelism, options);

  if (a.interactive) {
    cli::ManualPromptOptions prompt{a.assessor, a.assist, &registry, options};
    cli::prompt_manual_entries(store, id, std::cin, std::cout, prompt);
  }

  session = store.load_session(id);
  const auto pending = session.pending_manual();
  std::cout << "state: " << model::to_token(session.state) << ", " << session.protocols.size() << "/"
            << session.plan.entries.size() << " entries recorded\n";
  if (!pending.empty()) {
    std::cout << pending.size() << " manual entries pending; resume with: iotsam run --session-id " << id
              << " --interactive\n";
  } else {
    std::cout << "all entries covered; next: iotsam assess --session-id " << id << " --scheme <file>\n";
  }
  return kExitOk;
}

struct AssessArgs {
  std::optional<std::string> store;
  std::string session_id;
  std::string scheme;
  std::optional<std::string> out;
};

int cmd_assess(const AssessArgs& a) {
  auto scheme = load<model::AssessmentScheme>(a.scheme);
  store::CampaignStore store(store::CampaignStore::resolve_root(a.store));
  auto session = store.load_session(a.session_id);
  assessment::OverallVerdict verdict;
  if (session.verdict) {
    if (!(session.verdict->scheme == scheme)) {
      throw Error(ErrorCode::WrongState, "session " + a.session_id + " was already assessed under scheme '" +
                                             session.verdict->scheme.scheme_id + "'");
    }
    verdict = *session.verdict;
  } else {
    try {
      verdict = store.assess(a.session_id, scheme);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WrongState) throw;
      throw Error(ErrorCode::WrongState, e.message() + "; complete the session with `iotsam run --session-id " +
                                             a.session_id + " --interactive` first");
    }
  }
  if (a.out) write_output(*a.out, assessment::serialize_verdict(verdict));
  std::cout << "RESULT: " << model::to_token(verdict.result) << "\n";
  if (verdict.empty_plan) std::cout << "warning: empty plan, nothing was tested\n";
  for (const auto& rule : verdict.triggered_rules) std::cout << "  " << rule.rule << ": " << rule.detail << "\n";
  return verdict.result == assessment::OverallResult::Insecure ? kExitInsecure : kExitOk;
}

struct ReportArgs {
  std::optional<std::string> store;
  std::string session_id;
  std::string format = "text";
  std::optional<std::string> out;
};

int cmd_report(const ReportArgs& a) {
  store::CampaignStore store(store::CampaignStore::resolve_root(a.store));
  auto session = store.load_session(a.session_id);
  if (!session.verdict) {
    throw Error(ErrorCode::WrongState, "session " + a.session_id + " is not assessed yet; run `iotsam assess` first");
  }
  auto report = assessment::render_report(session.plan, session.protocols, session.verdict->case_verdicts,
                                          *session.verdict);
  std::string bytes = a.format == "machine" ? assessment::serialize_report(report) : assessment::report_text(report);
  if (a.out) {
    write_output(*a.out, bytes);
  } else {
    std::cout << bytes;
  }
  return kExitOk;
}

struct ServeArgs {
  std::optional<std::string> store;
  std::string listen{service::kDefaultListen};
  std::vector<std::string> schemes;
  std::size_t parallelism = 4;
  std::optional<std::string> static_dir;
  std::optional<double> probe_timeout;
};

int cmd_serve(const ServeArgs& a) {
  service::ServiceOptions options;
  options.store_root = store::CampaignStore::resolve_root(a.store);
  std::tie(options.host, options.port) = service::parse_listen(a.listen);
  for (const auto& file : a.schemes) options.schemes.push_back(load<model::AssessmentScheme>(file));
  options.parallelism = a.parallelism;
  options.harness = harness_options(a.probe_timeout);
  if (a.static_dir) options.static_dir = *a.static_dir;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::ApiServer server(options, bundled_registry());
  int port = server.bind();
  std::cout << "listening on http://" << options.host << ":" << port << service::kApiPrefix << " (store "
            << options.store_root.string() << ")\n"
            << std::flush;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iotsam: semi-automated IoT security assessment pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "iotsam 1.0.0");

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "Check documents of any supported kind");
  v->add_option("--file", validate.files, "Document to validate (repeatable)");
  v->add_option("files", validate.files, "Documents to validate");

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Select applicable test cases into a test plan");
  p->add_option("--device", plan.device, "Device model")->required();
  p->add_option("--profile", plan.profile, "Testing profile")->required();
  p->add_option("--catalog", plan.catalog, "Test case catalog")->required();
  p->add_option("--out", plan.out, "Write the plan here (default: standard output)");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Execute a plan within a stored session");
  r->add_option("--store", run.store, "Store root (default $IOTSAM_STORE or ./iotsam-store)");
  r->add_option("--session-id", run.session_id, "Resume an existing session");
  r->add_option("--plan", run.plan, "Plan to execute (computed when omitted)");
  r->add_option("--device", run.device, "Device model for a new session");
  r->add_option("--profile", run.profile, "Testing profile for a new session");
  r->add_option("--catalog", run.catalog, "Test case catalog for a new session");
  r->add_flag("--interactive", run.interactive, "Prompt for pending manual entries on standard input");
  r->add_flag("--assist-probes", run.assist, "Run executors to assist SEMI_AUTOMATED entries");
  r->add_option("--parallelism", run.parallelism, "Concurrent automated executors")->capture_default_str();
  r->add_option("--assessor", run.assessor, "Assessor id recorded in manual protocols")->capture_default_str();
  r->add_option("--probe-timeout", run.probe_timeout, "Default per-entry timeout in seconds");

  AssessArgs assess;
  auto* s = app.add_subcommand("assess", "Aggregate a completed session into a verdict (exit 3 = INSECURE)");
  s->add_option("--store", assess.store, "Store root");
  s->add_option("--session-id", assess.session_id, "Session to assess")->required();
  s->add_option("--scheme", assess.scheme, "Assessment scheme")->required();
  s->add_option("--out", assess.out, "Also write the verdict document here");

  ReportArgs report;
  auto* rep = app.add_subcommand("report", "Render the assessment report of a session");
  rep->add_option("--store", report.store, "Store root");
  rep->add_option("--session-id", report.session_id, "Assessed session")->required();
  rep->add_option("--format", report.format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}))
      ->capture_default_str();
  rep->add_option("--out", report.out, "Write here instead of standard output");

  ServeArgs serve;
  auto* srv = app.add_subcommand("serve", "Run the local HTTP API");
  srv->add_option("--store", serve.store, "Store root");
  srv->add_option("--listen", serve.listen, "host:port")->capture_default_str();
  srv->add_option("--scheme", serve.schemes, "Assessment scheme selectable by id (repeatable)");
  srv->add_option("--parallelism", serve.parallelism, "Concurrent automated executors")->capture_default_str();
  srv->add_option("--static", serve.static_dir, "Directory served at /");
  srv->add_option("--probe-timeout", serve.probe_timeout, "Default per-entry timeout in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (v->parsed()) return cmd_validate(validate);
    if (p->parsed()) return cmd_plan(plan);
    if (r->parsed()) return cmd_run(run);
    if (s->parsed()) return cmd_assess(assess);
    if (rep->parsed()) return cmd_report(report);
    if (srv->parsed()) return cmd_serve(serve);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
