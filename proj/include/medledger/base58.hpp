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

namespace medledger::base58 {

/// Bitcoin alphabet. Leading zero bytes map to leading '1' characters.
std::string encode(ByteView data);

/// Returns nullopt on any character outside the alphabet.
std::optional<Bytes> decode(std::string_view text);

}  // namespace medledger::base58
