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

#include "iotsam/error.hpp"

namespace iotsam {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SYNTAX";
    case ErrorCode::Schema: return "SCHEMA";
    case ErrorCode::Invariant: return "INVARIANT";
    case ErrorCode::UnresolvedPlaceholder: return "UNRESOLVED_PLACEHOLDER";
    case ErrorCode::DuplicateCapability: return "DUPLICATE_CAPABILITY";
    case ErrorCode::UnknownCapability: return "UNKNOWN_CAPABILITY";
    case ErrorCode::InvalidParameters: return "INVALID_PARAMETERS";
    case ErrorCode::StepCountMismatch: return "STEP_COUNT_MISMATCH";
    case ErrorCode::InvalidOutcome: return "INVALID_OUTCOME";
    case ErrorCode::Precondition: return "PRECONDITION";
    case ErrorCode::HostUnreachable: return "HOST_UNREACHABLE";
    case ErrorCode::ConnectionRefused: return "CONNECTION_REFUSED";
    case ErrorCode::NotTls: return "NOT_TLS";
    case ErrorCode::ServiceMismatch: return "SERVICE_MISMATCH";
    case ErrorCode::UnknownCase: return "UNKNOWN_CASE";
    case ErrorCode::EntryMismatch: return "ENTRY_MISMATCH";
    case ErrorCode::MixedPlan: return "MIXED_PLAN";
    case ErrorCode::CrossReference: return "CROSS_REFERENCE";
    case ErrorCode::InconsistentReferences: return "INCONSISTENT_REFERENCES";
    case ErrorCode::DuplicateEntry: return "DUPLICATE_ENTRY";
    case ErrorCode::WrongState: return "WRONG_STATE";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::CorruptLog: return "CORRUPT_LOG";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::string& path) {
  std::string out(code_name(code));
  if (!path.empty()) {
    out += " at ";
    out += path;
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::string path)
    : std::runtime_error(compose(code, message, path)),
      code_(code),
      message_(std::move(message)),
      path_(std::move(path)) {}

}  // namespace iotsam
