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

#include "medledger/crypto.hpp"

#include <openssl/evp.h>
#include <sodium.h>

#include <bit>
#include <mutex>

#include "medledger/error.hpp"

namespace medledger::crypto {
namespace {

EVP_MD_CTX* as_ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(Errc::Internal, "libsodium initialisation failed");
  });
}

}  // namespace

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
  if (ctx_ == nullptr || EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(as_ctx(ctx_));
    throw Error(Errc::Internal, "EVP sha256 init failed");
  }
}

Sha256::~Sha256() { EVP_MD_CTX_free(as_ctx(ctx_)); }

Sha256& Sha256::update(ByteView data) {
  EVP_DigestUpdate(as_ctx(ctx_), data.data(), data.size());
  return *this;
}

Hash Sha256::finish() {
  Hash out;
  unsigned int len = 0;
  EVP_DigestFinal_ex(as_ctx(ctx_), out.data(), &len);
  EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr);
  return out;
}

Hash sha256(ByteView data) {
  Hash out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::Internal, "EVP sha256 failed");
  }
  return out;
}

Hash sha256d(ByteView data) {
  Hash first = sha256(data);
  return sha256(first);
}

KeyPair generate_keypair() {
  ensure_sodium();
  Seed seed;
  randombytes_buf(seed.data(), seed.size());
  return keypair_from_seed(seed);
}

KeyPair keypair_from_seed(const Seed& seed) {
  ensure_sodium();
  KeyPair kp;
  kp.seed = seed;
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  crypto_sign_seed_keypair(kp.public_key.data(), sk.data(), seed.data());
  sodium_memzero(sk.data(), sk.size());
  return kp;
}

Bytes sign(const Seed& seed, ByteView message) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  crypto_sign_seed_keypair(pk.data(), sk.data(), seed.data());
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sk.data());
  sodium_memzero(sk.data(), sk.size());
  return sig;
}

bool verify(const PublicKey& key, ByteView message, ByteView signature) {
  ensure_sodium();
  if (signature.size() != crypto_sign_BYTES) return false;
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     key.data()) == 0;
}

std::uint64_t random_u64() {
  ensure_sodium();
  std::uint64_t v = 0;
  randombytes_buf(&v, sizeof v);
  return v;
}

unsigned leading_zero_bits(const Hash& h) {
  unsigned bits = 0;
  for (auto byte : h) {
    if (byte == 0) {
      bits += 8;
      continue;
    }
    bits += static_cast<unsigned>(std::countl_zero(byte));
    break;
  }
  return bits;
}

}  // namespace medledger::crypto
