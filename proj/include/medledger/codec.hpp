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

#include <cstdint>
#include <string>
#include <string_view>

#include "medledger/bytes.hpp"

namespace medledger {

// Canonical binary encoding shared by everything that gets hashed or
// persisted: integers big-endian fixed width, byte strings and UTF-8 strings
// prefixed with a u32 length.

class Writer {
 public:
  Writer& u8(std::uint8_t v);
  Writer& u32(std::uint32_t v);
  Writer& u64(std::uint64_t v);
  Writer& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  Writer& raw(ByteView b);
  Writer& bytes(ByteView b);
  Writer& str(std::string_view s) { return bytes(as_view(s)); }

  const Bytes& data() const& { return buf_; }
  Bytes data() && { return std::move(buf_); }

 private:
  Bytes buf_;
};

/// Bounds-checked reader; every accessor throws Error(ParseError) on
/// truncated input.
class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  ByteView raw(std::size_t n);
  Bytes bytes();
  std::string str();
  Hash hash();

  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_done() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace medledger
