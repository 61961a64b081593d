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

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "medledger/bytes.hpp"
#include "medledger/crypto.hpp"

namespace medledger {

enum class Role : std::uint8_t { admin = 0, doctor = 1, patient = 2 };

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view text);

/// A participant certificate reduced to what access decisions need. The
/// signing seed is only present on the holder's own copy.
struct Identity {
  std::string user_id;
  Role role = Role::patient;
  std::string department;
  crypto::PublicKey public_key{};
  std::int64_t issued_at = 0;
  std::optional<crypto::Seed> signing_seed;

  bool can_sign() const { return signing_seed.has_value(); }
  Identity public_part() const;
};

struct SignedEnvelope {
  Bytes payload;
  std::string signer;
  Bytes signature;

  friend bool operator==(const SignedEnvelope&, const SignedEnvelope&) = default;
};

/// Signs `payload` with the identity's seed. Throws Error(InvalidArgument)
/// when called on a public-only identity.
SignedEnvelope sign(const Identity& identity, Bytes payload);

/// Issues identities and answers signature checks.
///
/// Registration is serialised; verify() and lookup() take a shared lock and
/// may be called from any number of threads.
class CertificateAuthority {
 public:
  CertificateAuthority() = default;

  /// Throws Error(DuplicateIdentity) when `user_id` is taken and
  /// Error(InvalidArgument) for an empty id or one containing tabs/newlines.
  Identity register_identity(const std::string& user_id, Role role,
                             const std::string& department, std::int64_t issued_at = 0);

  /// Records an identity whose key pair already exists (used when loading).
  void add(const Identity& identity);

  /// Throws Error(UnknownSigner) if the signer is not registered.
  bool verify(const SignedEnvelope& envelope) const;

  std::optional<Identity> lookup(const std::string& user_id) const;
  std::vector<Identity> identities() const;
  std::size_t size() const;

  /// `user_id<TAB>role<TAB>department<TAB>base58(public_key)` per line.
  void save(const std::filesystem::path& file) const;
  /// Adds every record of a save() file.
  void load(const std::filesystem::path& file);
  /// Appends one record in the save() format.
  static void append_record(const std::filesystem::path& file, const Identity& identity);

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Identity> by_id_;
};

/// Holder-side storage of signing seeds, one `<user_id>.key` file per
/// identity containing the base58 seed.
class Wallet {
 public:
  explicit Wallet(std::filesystem::path dir);

  void store(const Identity& identity) const;
  /// Returns the identity with its seed attached, or nullopt if the wallet
  /// has no key for it.
  std::optional<Identity> unlock(const Identity& public_identity) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace medledger
