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

#include <string>

#include "medledger/bytes.hpp"

namespace medledger::crypto {

Hash sha256(ByteView data);

/// SHA256(SHA256(data)).
Hash sha256d(ByteView data);

/// Incremental hasher; reusable after finish().
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(ByteView data);
  Hash finish();

 private:
  void* ctx_;
};

inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSignatureSize = 64;

using Seed = std::array<std::uint8_t, kSeedSize>;
using PublicKey = std::array<std::uint8_t, kPublicKeySize>;

/// Ed25519 key material. The seed is the only secret that is persisted.
struct KeyPair {
  Seed seed{};
  PublicKey public_key{};
};

KeyPair generate_keypair();
KeyPair keypair_from_seed(const Seed& seed);

Bytes sign(const Seed& seed, ByteView message);
bool verify(const PublicKey& key, ByteView message, ByteView signature);

std::uint64_t random_u64();

/// Count of leading zero bits, most significant byte first.
unsigned leading_zero_bits(const Hash& h);

}  // namespace medledger::crypto
