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

#include "medledger/content_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <thread>

#include "medledger/base58.hpp"
#include "medledger/crypto.hpp"
#include "medledger/error.hpp"

namespace medledger {

ContentAddress ContentAddress::of(ByteView content) {
  ContentAddress a;
  a.multihash_[0] = 0x12;
  a.multihash_[1] = 0x20;
  Hash d = crypto::sha256d(content);
  std::copy(d.begin(), d.end(), a.multihash_.begin() + 2);
  return a;
}

std::optional<ContentAddress> ContentAddress::parse(std::string_view text) {
  auto raw = base58::decode(text);
  if (!raw || raw->size() != kSize || (*raw)[0] != 0x12 || (*raw)[1] != 0x20) return std::nullopt;
  ContentAddress a;
  std::copy(raw->begin(), raw->end(), a.multihash_.begin());
  return a;
}

std::string ContentAddress::text() const { return base58::encode(multihash_); }

Hash ContentAddress::digest() const {
  Hash d;
  std::copy(multihash_.begin() + 2, multihash_.end(), d.begin());
  return d;
}

ContentStore::ContentStore(std::filesystem::path dir, bool durable)
    : dir_(std::move(dir)), durable_(durable) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::StoreError, "cannot create blob directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path ContentStore::path_of(const ContentAddress& address) const {
  return dir_ / address.text();
}

namespace {

void write_all(int fd, ByteView data, const std::filesystem::path& p) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::StoreError, "write " + p.string() + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

}  // namespace

ContentAddress ContentStore::put(ByteView content) {
  ContentAddress address = ContentAddress::of(content);
  auto final_path = path_of(address);
  puts_.fetch_add(1, std::memory_order_relaxed);
  if (std::filesystem::exists(final_path)) return address;

  auto tmp = dir_ / (".tmp-" + address.text() + "-" + std::to_string(::getpid()) + "-" +
                     std::to_string(tmp_counter_.fetch_add(1)));
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(Errc::StoreError, "open " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, content, tmp);
    if (durable_ && ::fsync(fd) != 0) {
      throw Error(Errc::StoreError, "fsync " + tmp.string() + ": " + std::strerror(errno));
    }
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), final_path.c_str()) != 0) {
    int err = errno;
    ::unlink(tmp.c_str());
    throw Error(Errc::StoreError, "rename " + final_path.string() + ": " + std::strerror(err));
  }
  return address;
}

Bytes ContentStore::get(const ContentAddress& address) const {
  gets_.fetch_add(1, std::memory_order_relaxed);
  auto p = path_of(address);
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, "no blob " + address.text());
  Bytes content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::StoreError, "read " + p.string());
  if (ContentAddress::of(content) != address) {
    throw Error(Errc::CorruptBlob, "blob " + address.text() + " does not match its address");
  }
  return content;
}

void ContentStore::remove(const ContentAddress& address) {
  removes_.fetch_add(1, std::memory_order_relaxed);
  std::error_code ec;
  if (!std::filesystem::remove(path_of(address), ec)) {
    if (ec) throw Error(Errc::StoreError, "remove " + address.text() + ": " + ec.message());
    throw Error(Errc::NotFound, "no blob " + address.text());
  }
}

bool ContentStore::contains(const ContentAddress& address) const {
  return std::filesystem::exists(path_of(address));
}

std::size_t ContentStore::size() const {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.is_regular_file() && !entry.path().filename().string().starts_with(".tmp-")) ++n;
  }
  return n;
}

ContentStore::Stats ContentStore::stats() const {
  return {puts_.load(), gets_.load(), removes_.load()};
}

}  // namespace medledger
