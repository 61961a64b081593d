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
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <unistd.h>

#include "medledger/bytes.hpp"

namespace medledger::testing {

/// Removed on destruction unless MEDLEDGER_KEEP_TMP is set.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("medledger-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    if (!std::getenv("MEDLEDGER_KEEP_TMP")) {
      std::error_code ec;
      std::filesystem::remove_all(path_, ec);
    }
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Seed from MEDLEDGER_TEST_SEED, else fixed. Printed so failures reproduce.
inline std::uint64_t test_seed() {
  static const std::uint64_t seed = [] {
    const char* env = std::getenv("MEDLEDGER_TEST_SEED");
    std::uint64_t s = env ? std::strtoull(env, nullptr, 10) : 20260315u;
    std::cerr << "test seed " << s << '\n';
    return s;
  }();
  return seed;
}

class Gen {
 public:
  explicit Gen(std::uint64_t salt = 0) : rng_(test_seed() ^ (salt * 0x9e3779b97f4a7c15ull)) {}

  std::uint64_t u64() { return rng_(); }
  /// Uniform in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  Bytes bytes(std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng_());
    return b;
  }
  Bytes bytes_upto(std::size_t max) { return bytes(static_cast<std::size_t>(range(0, max))); }

  /// Printable identifier from a small alphabet so collisions happen.
  std::string ident(std::size_t alphabet = 4, std::size_t len = 2) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('a' + range(0, alphabet - 1));
    return s;
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<std::int64_t>(v.size()) - 1))];
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace medledger::testing
