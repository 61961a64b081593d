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

#include "medledger/membership.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "medledger/base58.hpp"
#include "medledger/error.hpp"

namespace medledger {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::admin: return "admin";
    case Role::doctor: return "doctor";
    case Role::patient: return "patient";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "admin") return Role::admin;
  if (text == "doctor") return Role::doctor;
  if (text == "patient") return Role::patient;
  return std::nullopt;
}

Identity Identity::public_part() const {
  Identity copy = *this;
  copy.signing_seed.reset();
  return copy;
}

SignedEnvelope sign(const Identity& identity, Bytes payload) {
  if (!identity.can_sign()) {
    throw Error(Errc::InvalidArgument, "identity '" + identity.user_id + "' holds no signing key");
  }
  SignedEnvelope env;
  env.signature = crypto::sign(*identity.signing_seed, payload);
  env.payload = std::move(payload);
  env.signer = identity.user_id;
  return env;
}

namespace {

void check_field(const std::string& value, const char* what) {
  if (value.find_first_of("\t\r\n") != std::string::npos) {
    throw Error(Errc::InvalidArgument, std::string(what) + " must not contain tabs or newlines");
  }
}

}  // namespace

Identity CertificateAuthority::register_identity(const std::string& user_id, Role role,
                                                 const std::string& department,
                                                 std::int64_t issued_at) {
  if (user_id.empty()) throw Error(Errc::InvalidArgument, "user_id must not be empty");
  if (user_id.find('/') != std::string::npos) {
    throw Error(Errc::InvalidArgument, "user_id must not contain '/'");
  }
  check_field(user_id, "user_id");
  check_field(department, "department");

  std::unique_lock lock(mu_);
  if (by_id_.contains(user_id)) {
    throw Error(Errc::DuplicateIdentity, "identity '" + user_id + "' already registered");
  }
  auto keys = crypto::generate_keypair();
  Identity id{user_id, role, department, keys.public_key, issued_at, keys.seed};
  by_id_.emplace(user_id, id.public_part());
  return id;
}

void CertificateAuthority::add(const Identity& identity) {
  std::unique_lock lock(mu_);
  if (!by_id_.emplace(identity.user_id, identity.public_part()).second) {
    throw Error(Errc::DuplicateIdentity, "identity '" + identity.user_id + "' already registered");
  }
}

bool CertificateAuthority::verify(const SignedEnvelope& envelope) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(envelope.signer);
  if (it == by_id_.end()) {
    throw Error(Errc::UnknownSigner, "signer '" + envelope.signer + "' is not registered");
  }
  return crypto::verify(it->second.public_key, envelope.payload, envelope.signature);
}

std::optional<Identity> CertificateAuthority::lookup(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(user_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<Identity> CertificateAuthority::identities() const {
  std::shared_lock lock(mu_);
  std::vector<Identity> out;
  out.reserve(by_id_.size());
  for (const auto& [_, id] : by_id_) out.push_back(id);
  return out;
}

std::size_t CertificateAuthority::size() const {
  std::shared_lock lock(mu_);
  return by_id_.size();
}

void CertificateAuthority::save(const std::filesystem::path& file) const {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    std::shared_lock lock(mu_);
    for (const auto& [_, id] : by_id_) {
      out << id.user_id << '\t' << role_name(id.role) << '\t' << id.department << '\t'
          << base58::encode(id.public_key) << '\n';
    }
    if (!out.flush()) throw Error(Errc::Io, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

void CertificateAuthority::append_record(const std::filesystem::path& file,
                                         const Identity& identity) {
  std::ofstream out(file, std::ios::binary | std::ios::app);
  out << identity.user_id << '\t' << role_name(identity.role) << '\t' << identity.department
      << '\t' << base58::encode(identity.public_key) << '\n';
  if (!out.flush()) throw Error(Errc::Io, "cannot append to " + file.string());
}

void CertificateAuthority::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + file.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (line.back() == '\t') fields.emplace_back();
    auto bad = [&](const std::string& why) {
      return Error(Errc::ParseError, file.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    if (fields.size() != 4) throw bad("expected 4 tab-separated fields");
    auto role = parse_role(fields[1]);
    if (!role) throw bad("unknown role '" + fields[1] + "'");
    auto key = base58::decode(fields[3]);
    if (!key || key->size() != crypto::kPublicKeySize) throw bad("malformed public key");
    Identity id;
    id.user_id = fields[0];
    id.role = *role;
    id.department = fields[2];
    std::copy(key->begin(), key->end(), id.public_key.begin());
    add(id);
  }
}

Wallet::Wallet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void Wallet::store(const Identity& identity) const {
  if (!identity.can_sign()) throw Error(Errc::InvalidArgument, "identity holds no signing key");
  std::ofstream out(dir_ / (identity.user_id + ".key"), std::ios::binary | std::ios::trunc);
  out << base58::encode(*identity.signing_seed) << '\n';
  if (!out.flush()) throw Error(Errc::Io, "cannot write wallet key for " + identity.user_id);
  std::filesystem::permissions(dir_ / (identity.user_id + ".key"),
                               std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
}

std::optional<Identity> Wallet::unlock(const Identity& public_identity) const {
  std::ifstream in(dir_ / (public_identity.user_id + ".key"), std::ios::binary);
  if (!in) return std::nullopt;
  std::string text;
  in >> text;
  auto seed_bytes = base58::decode(text);
  if (!seed_bytes || seed_bytes->size() != crypto::kSeedSize) {
    throw Error(Errc::ParseError, "malformed wallet key for " + public_identity.user_id);
  }
  crypto::Seed seed;
  std::copy(seed_bytes->begin(), seed_bytes->end(), seed.begin());
  if (crypto::keypair_from_seed(seed).public_key != public_identity.public_key) {
    throw Error(Errc::AuthFailed, "wallet key does not match certificate for " + public_identity.user_id);
  }
  Identity id = public_identity;
  id.signing_seed = seed;
  return id;
}

}  // namespace medledger
