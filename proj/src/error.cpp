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

#include "medledger/error.hpp"

#include "medledger/bytes.hpp"

namespace medledger {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::Io: return "Io";
    case Errc::ConfigError: return "ConfigError";
    case Errc::DuplicateIdentity: return "DuplicateIdentity";
    case Errc::UnknownSigner: return "UnknownSigner";
    case Errc::AuthFailed: return "AuthFailed";
    case Errc::StoreError: return "StoreError";
    case Errc::NotFound: return "NotFound";
    case Errc::CorruptBlob: return "CorruptBlob";
    case Errc::ChainMismatch: return "ChainMismatch";
    case Errc::InvalidBlock: return "InvalidBlock";
    case Errc::KeyNotFound: return "KeyNotFound";
    case Errc::QueueClosed: return "QueueClosed";
    case Errc::Duplicate: return "Duplicate";
    case Errc::BadPolicy: return "BadPolicy";
    case Errc::Exists: return "Exists";
    case Errc::NoPolicy: return "NoPolicy";
    case Errc::Denied: return "Denied";
    case Errc::Expired: return "Expired";
    case Errc::NotAdmin: return "NotAdmin";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

std::string to_hex(ByteView b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (auto c : b) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::ParseError, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::ParseError, "invalid hex character");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

Hash hash_from_hex(std::string_view hex) {
  Bytes b = from_hex(hex);
  if (b.size() != 32) throw Error(Errc::ParseError, "expected 32-byte hex digest");
  Hash h;
  std::copy(b.begin(), b.end(), h.begin());
  return h;
}

}  // namespace medledger
