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

#include "interactive.hpp"

#include <iostream>
#include <optional>

namespace iotsam::cli {

namespace {

std::optional<std::string> read_line(std::istream& in, std::ostream& out, std::string_view prompt) {
  out << prompt << std::flush;
  std::string line;
  if (!std::getline(in, line)) {
    out << "\n";
    return std::nullopt;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string trimmed(std::string text) {
  auto b = text.find_first_not_of(" \t");
  auto e = text.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : text.substr(b, e - b + 1);
}

std::optional<harness::Outcome> read_outcome(std::istream& in, std::ostream& out) {
  for (;;) {
    auto line = read_line(in, out, "  outcome [PASS/FAIL/INCONCLUSIVE/SKIPPED]> ");
    if (!line) return std::nullopt;
    std::string token = trimmed(*line);
    for (auto& c : token) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    auto outcome = model::from_token<harness::Outcome>(token);
    if (outcome && *outcome != harness::Outcome::Error) return outcome;
    out << "  '" << *line << "' is not one of PASS, FAIL, INCONCLUSIVE, SKIPPED\n";
  }
}

}  // namespace

std::size_t prompt_manual_entries(store::CampaignStore& store, const std::string& session_id,
                                  std::istream& in, std::ostream& out, const ManualPromptOptions& options) {
  auto session = store.load_session(session_id);
  auto pending = session.pending_manual();
  std::size_t recorded = 0;
  for (std::size_t n = 0; n < pending.size(); ++n) {
    const auto& entry = pending[n];
    out << "\n== " << (n + 1) << "/" << pending.size() << " [" << model::to_token(entry.severity) << "] "
        << entry.case_id << " on " << entry.target_component_id << " (" << model::to_token(entry.mode) << ")\n"
        << "   " << entry.title << "\n";

    std::vector<harness::Observation> assisted;
    if (options.assist_probes && entry.mode == model::ExecutionMode::SemiAutomated && entry.executor &&
        options.registry != nullptr) {
      out << "   running " << entry.executor->capability << " to assist...\n";
      assisted = harness::collect_assist_observations(session.plan, entry, *options.registry, options.harness);
      for (const auto& o : assisted) out << "   assist: " << harness::to_json(o).dump() << "\n";
    }

    std::vector<std::vector<harness::Observation>> steps;
    bool complete = true;
    for (std::size_t k = 0; k < entry.guide.size(); ++k) {
      const auto& step = entry.guide[k];
      out << "  step " << (k + 1) << "/" << entry.guide.size() << ": " << step.text << "\n";
      if (!step.expected_observation.empty()) out << "    expected: " << step.expected_observation << "\n";
      auto line = read_line(in, out, "  observation> ");
      if (!line) {
        complete = false;
        break;
      }
      std::vector<harness::Observation> observations;
      if (k == 0) observations = std::move(assisted);
      if (!trimmed(*line).empty()) observations.push_back(harness::text_observation(*line, options.harness.clock()));
      steps.push_back(std::move(observations));
    }
    std::optional<harness::Outcome> outcome;
    std::optional<std::string> rationale;
    if (complete) outcome = read_outcome(in, out);
    if (outcome) rationale = read_line(in, out, "  rationale> ");
    if (!rationale) {
      out << "input ended; " << (pending.size() - n) << " entries left pending\n";
      break;
    }
    auto protocol = harness::record_manual_result(session.plan, entry, options.assessor_id, std::move(steps), *outcome,
                                                  *rationale, options.harness.clock);
    store.append_protocol(session_id, protocol);
    out << "  recorded " << protocol.protocol_id << ": " << model::to_token(protocol.outcome) << "\n";
    ++recorded;
  }
  return recorded;
}

}  // namespace iotsam::cli
