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

#include "doctest.h"
#include "medledger/crypto.hpp"
#include "test_support.hpp"

using namespace medledger;

TEST_CASE("sha256 vectors") {
  CHECK(to_hex(crypto::sha256(Bytes{})) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(crypto::sha256(as_view("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(crypto::sha256d(as_view("hello"))) ==
        "9595c9df90075148eb06860365df33584b75bff782a510c6cd4883a419833d50");
}

TEST_CASE("incremental hasher matches one-shot and is reusable") {
  testing::Gen g(3);
  crypto::Sha256 h;
  for (int i = 0; i < 50; ++i) {
    Bytes data = g.bytes_upto(300);
    auto cut = static_cast<std::size_t>(g.range(0, static_cast<std::int64_t>(data.size())));
    ByteView v(data);
    CHECK(h.update(v.first(cut)).update(v.subspan(cut)).finish() == crypto::sha256(data));
  }
}

TEST_CASE("ed25519 RFC 8032 test 1") {
  crypto::Seed seed{};
  auto s = from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
  std::copy(s.begin(), s.end(), seed.begin());
  auto kp = crypto::keypair_from_seed(seed);
  CHECK(to_hex(kp.public_key) == "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  auto sig = crypto::sign(seed, Bytes{});
  CHECK(to_hex(sig) ==
        "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  CHECK(crypto::verify(kp.public_key, Bytes{}, sig));
}

TEST_CASE("any flipped bit breaks a signature") {
  testing::Gen g(4);
  auto kp = crypto::generate_keypair();
  for (int i = 0; i < 200; ++i) {
    Bytes msg = g.bytes(static_cast<std::size_t>(g.range(1, 64)));
    Bytes sig = crypto::sign(kp.seed, msg);
    REQUIRE(crypto::verify(kp.public_key, msg, sig));
    Bytes bad_msg = msg;
    bad_msg[static_cast<std::size_t>(g.range(0, bad_msg.size() - 1))] ^= 1u << g.range(0, 7);
    CHECK_FALSE(crypto::verify(kp.public_key, bad_msg, sig));
    Bytes bad_sig = sig;
    bad_sig[static_cast<std::size_t>(g.range(0, 63))] ^= 1u << g.range(0, 7);
    CHECK_FALSE(crypto::verify(kp.public_key, msg, bad_sig));
  }
  CHECK_FALSE(crypto::verify(kp.public_key, as_view("x"), Bytes(10)));
}

TEST_CASE("leading zero bits") {
  Hash h{};
  CHECK(crypto::leading_zero_bits(h) == 256);
  h[0] = 0x80;
  CHECK(crypto::leading_zero_bits(h) == 0);
  h[0] = 0;
  h[1] = 0x01;
  CHECK(crypto::leading_zero_bits(h) == 15);
}
