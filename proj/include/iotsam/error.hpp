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

#include <stdexcept>
#include <string>
#include <string_view>

namespace iotsam {

/// Machine-readable error category. The token spelling (see code_name) is
/// part of the external contract: the CLI prints it and the HTTP API returns
/// it verbatim in the `code` field.
enum class ErrorCode {
  Syntax,
  Schema,
  Invariant,
  UnresolvedPlaceholder,
  DuplicateCapability,
  UnknownCapability,
  InvalidParameters,
  StepCountMismatch,
  InvalidOutcome,
  Precondition,
  HostUnreachable,
  ConnectionRefused,
  NotTls,
  ServiceMismatch,
  UnknownCase,
  EntryMismatch,
  MixedPlan,
  CrossReference,
  InconsistentReferences,
  DuplicateEntry,
  WrongState,
  NotFound,
  CorruptLog,
  Io,
};

std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string path = {});

  ErrorCode code() const noexcept { return code_; }
  /// Location inside a document ("/cases/3/case-id"), empty when not
  /// applicable.
  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string path_;
};

}  // namespace iotsam
