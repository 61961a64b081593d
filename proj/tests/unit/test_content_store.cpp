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

#include <fstream>
#include <thread>

#include "doctest.h"
#include "medledger/base58.hpp"
#include "medledger/content_store.hpp"
#include "medledger/crypto.hpp"
#include "medledger/error.hpp"
#include "test_support.hpp"

using namespace medledger;

// Computed with Python's hashlib and a reference Base58 encoder.
constexpr const char* kEmptyAddress = "QmUfSxyqLvXdTRgMt8AajpFWd9EtgZ5RakhL87YUr1aBbs";
constexpr const char* kHelloWorldAddress = "Qmb22mDykkf6WVnKo5Qrca9j5qqjG1nVED7bd8xt4HA3QW";

TEST_CASE("addresses match precomputed values") {
  CHECK(ContentAddress::of(Bytes{}).text() == kEmptyAddress);
  CHECK(ContentAddress::of(as_view("hello world")).text() == kHelloWorldAddress);
  auto a = ContentAddress::of(Bytes{});
  CHECK(a.multihash()[0] == 0x12);
  CHECK(a.multihash()[1] == 0x20);
  CHECK(a.digest() == crypto::sha256d(Bytes{}));
}

TEST_CASE("parse accepts only well-formed multihashes") {
  auto a = ContentAddress::parse(kHelloWorldAddress);
  REQUIRE(a.has_value());
  CHECK(a->text() == kHelloWorldAddress);
  CHECK_FALSE(ContentAddress::parse("").has_value());
  CHECK_FALSE(ContentAddress::parse("0OIl").has_value());
  Bytes wrong_prefix(34, 7);
  CHECK_FALSE(ContentAddress::parse(base58::encode(wrong_prefix)).has_value());
  Bytes short_hash{0x12, 0x20, 1, 2, 3};
  CHECK_FALSE(ContentAddress::parse(base58::encode(short_hash)).has_value());
}

TEST_CASE("put/get round trip and idempotence") {
  testing::TempDir dir("cs");
  ContentStore store(dir / "blobs");
  testing::Gen g(5);
  for (int i = 0; i < 100; ++i) {
    Bytes blob = g.bytes_upto(64 * 1024);
    auto addr = store.put(blob);
    CHECK(addr == ContentAddress::of(blob));
    CHECK(store.put(blob) == addr);
    CHECK(store.get(addr) == blob);
  }
  CHECK(store.size() <= 100);
}

TEST_CASE("missing and corrupt blobs") {
  testing::TempDir dir("cs2");
  ContentStore store(dir / "blobs");
  auto addr = ContentAddress::of(as_view("absent"));
  CHECK_FALSE(store.contains(addr));
  try {
    (void)store.get(addr);
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotFound);
  }

  auto real = store.put(as_view("payload"));
  std::ofstream(store.path_of(real), std::ios::trunc) << "tampered";
  try {
    (void)store.get(real);
    FAIL("expected CorruptBlob");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CorruptBlob);
  }

  store.remove(real);
  CHECK_FALSE(store.contains(real));
  CHECK_THROWS_AS(store.remove(real), Error);
}

TEST_CASE("concurrent identical puts") {
  testing::TempDir dir("cs3");
  ContentStore store(dir / "blobs", true);
  Bytes blob(4096, 0x5a);
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i) ts.emplace_back([&] { store.put(blob); });
  for (auto& t : ts) t.join();
  CHECK(store.size() == 1);
  CHECK(store.get(ContentAddress::of(blob)) == blob);
  CHECK(store.stats().puts == 8);
}
