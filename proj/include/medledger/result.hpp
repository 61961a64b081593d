// Copyright 2026 The medledger Authors.
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

#include <optional>
#include <string>

#include "medledger/bytes.hpp"
#include "medledger/error.hpp"

namespace medledger {

enum class Status { Ok, Error };

/// Outcome of a contract method. An Error always carries a code and a
/// non-empty message.
struct ContractResult {
  Status status = Status::Ok;
  std::optional<Errc> code;
  std::string message;
  Bytes payload;

  static ContractResult success(std::string message = "", Bytes payload = {}) {
    return {Status::Ok, std::nullopt, std::move(message), std::move(payload)};
  }
  static ContractResult failure(Errc code, std::string message) {
    if (message.empty()) message = std::string(errc_name(code));
    return {Status::Error, code, std::move(message), {}};
  }

  bool ok() const { return status == Status::Ok; }
  std::string_view error_name() const { return code ? errc_name(*code) : std::string_view{}; }
};

}  // namespace medledger
