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

#include "medledger/codec.hpp"

#include "medledger/error.hpp"

namespace medledger {

Writer& Writer::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::raw(ByteView b) {
  buf_.insert(buf_.end(), b.begin(), b.end());
  return *this;
}

Writer& Writer::bytes(ByteView b) {
  if (b.size() > UINT32_MAX) throw Error(Errc::InvalidArgument, "field exceeds 4 GiB");
  u32(static_cast<std::uint32_t>(b.size()));
  return raw(b);
}

ByteView Reader::raw(std::size_t n) {
  if (n > remaining()) throw Error(Errc::ParseError, "truncated input");
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint32_t Reader::u32() {
  ByteView b = raw(4);
  std::uint32_t v = 0;
  for (auto c : b) v = v << 8 | c;
  return v;
}

std::uint64_t Reader::u64() {
  ByteView b = raw(8);
  std::uint64_t v = 0;
  for (auto c : b) v = v << 8 | c;
  return v;
}

Bytes Reader::bytes() {
  std::uint32_t n = u32();
  ByteView b = raw(n);
  return Bytes(b.begin(), b.end());
}

std::string Reader::str() {
  std::uint32_t n = u32();
  ByteView b = raw(n);
  return std::string(b.begin(), b.end());
}

Hash Reader::hash() {
  ByteView b = raw(32);
  Hash h;
  std::copy(b.begin(), b.end(), h.begin());
  return h;
}

void Reader::expect_done() const {
  if (!done()) throw Error(Errc::ParseError, "trailing bytes after record");
}

}  // namespace medledger
