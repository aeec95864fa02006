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

#pragma once

#include <iosfwd>
#include <string>

#include "iotsam/harness/harness.hpp"
#include "iotsam/store/campaign_store.hpp"

namespace iotsam::cli {

struct ManualPromptOptions {
  std::string assessor_id;
  /// Run the entry's executor for SEMI_AUTOMATED entries and attach its
  /// observations to the first step.
  bool assist_probes = false;
  const harness::ExecutorRegistry* registry = nullptr;
  harness::HarnessOptions harness;
};

/// Walks the pending MANUAL and SEMI_AUTOMATED entries in plan order. Per
/// entry it reads one observation line per guide step (empty = none), an
/// outcome line and a rationale line. End of input leaves the remaining
/// entries pending. Returns the number of protocols recorded.
std::size_t prompt_manual_entries(store::CampaignStore& store, const std::string& session_id,
                                  std::istream& in, std::ostream& out, const ManualPromptOptions& options);

}  // namespace iotsam::cli
