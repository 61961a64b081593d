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

#include <atomic>
#include <compare>
#include <filesystem>
#include <optional>
#include <string>

#include "medledger/bytes.hpp"

namespace medledger {

/// Self-describing address of a blob: multihash `0x12 0x20 || SHA256(SHA256(content))`,
/// rendered as Base58 text. The 34-byte form is the canonical one.
class ContentAddress {
 public:
  static constexpr std::size_t kSize = 34;
  using Multihash = std::array<std::uint8_t, kSize>;

  static ContentAddress of(ByteView content);
  /// nullopt unless `text` decodes to exactly 34 bytes with the 0x12 0x20 prefix.
  static std::optional<ContentAddress> parse(std::string_view text);

  std::string text() const;
  const Multihash& multihash() const { return multihash_; }
  Hash digest() const;

  friend auto operator<=>(const ContentAddress&, const ContentAddress&) = default;

 private:
  ContentAddress() = default;
  Multihash multihash_{};
};

/// Content-addressed blob directory. One file per blob, named by the text
/// address; the directory listing is the index.
///
/// get/put/remove are safe to call concurrently. Identical concurrent puts
/// both succeed because each writes a private temp file and renames it.
class ContentStore {
 public:
  struct Stats {
    std::uint64_t puts = 0;
    std::uint64_t gets = 0;
    std::uint64_t removes = 0;
  };

  /// `durable` fsyncs each new blob before it becomes visible.
  explicit ContentStore(std::filesystem::path dir, bool durable = false);

  ContentAddress put(ByteView content);
  /// Throws Error(NotFound) or Error(CorruptBlob); never returns bytes that
  /// do not hash to `address`.
  Bytes get(const ContentAddress& address) const;
  /// Throws Error(NotFound). No reference counting.
  void remove(const ContentAddress& address);

  bool contains(const ContentAddress& address) const;
  std::size_t size() const;
  std::filesystem::path path_of(const ContentAddress& address) const;
  const std::filesystem::path& dir() const { return dir_; }
  Stats stats() const;

 private:
  std::filesystem::path dir_;
  bool durable_;
  mutable std::atomic<std::uint64_t> puts_{0}, gets_{0}, removes_{0};
  std::atomic<std::uint64_t> tmp_counter_{0};
};

}  // namespace medledger
