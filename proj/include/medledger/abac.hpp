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

#include <optional>
#include <string>
#include <string_view>

#include "medledger/bytes.hpp"
#include "medledger/membership.hpp"

/// Attribute model and the allow/deny rule applied by the access contract.
///
/// A policy binds subject attributes (user id, role, department) and an
/// object attribute (record id) to a permission bit and a validity window.
/// At most one policy exists per (subject, object) pair; its id is the hash
/// of the two attribute groups.
namespace medledger::abac {

bool single_line(std::string_view s);

struct SubjectAttrs {
  std::string user_id;
  Role role = Role::patient;
  std::string department;

  /// Non-empty single-line fields and a subject role (doctor or patient).
  bool valid() const;
  friend bool operator==(const SubjectAttrs&, const SubjectAttrs&) = default;
};

struct ObjectAttrs {
  std::string record_id;

  bool valid() const;
  friend bool operator==(const ObjectAttrs&, const ObjectAttrs&) = default;
};

struct PermissionAttr {
  /// 1 = allow, 0 = deny; anything else is invalid.
  int allow = 0;

  bool valid() const { return allow == 0 || allow == 1; }
  friend bool operator==(const PermissionAttr&, const PermissionAttr&) = default;
};

struct EnvironmentAttrs {
  std::int64_t create_time = 0;
  std::int64_t end_time = 0;

  bool valid() const { return create_time <= end_time; }
  friend bool operator==(const EnvironmentAttrs&, const EnvironmentAttrs&) = default;
};

/// A policy as submitted, before validation. Missing attribute groups are
/// represented as nullopt so that validation can reject them.
struct PolicyDraft {
  std::optional<SubjectAttrs> subject;
  std::optional<ObjectAttrs> object;
  std::optional<PermissionAttr> permission;
  std::optional<EnvironmentAttrs> environment;
};

struct Policy {
  SubjectAttrs subject;
  ObjectAttrs object;
  PermissionAttr permission;
  EnvironmentAttrs environment;
  Hash id{};

  PolicyDraft draft() const { return {subject, object, permission, environment}; }
  friend bool operator==(const Policy&, const Policy&) = default;
};

struct AccessRequest {
  SubjectAttrs subject;
  ObjectAttrs object;
  std::int64_t requested_at = 0;
};

enum class Decision { Allow, Deny };

/// True iff all four attribute groups are present and individually valid.
bool check_policy(const PolicyDraft& candidate);

/// Length-prefixed encodings hashed into the policy id.
Bytes canonical_subject(const SubjectAttrs& subject);
Bytes canonical_object(const ObjectAttrs& object);

/// SHA256(canonical(subject) ++ canonical(object)). Independent of the
/// permission and environment, so updates keep the id.
Hash policy_id(const SubjectAttrs& subject, const ObjectAttrs& object);

/// Validates and assigns the id; nullopt if check_policy fails.
std::optional<Policy> make_policy(const PolicyDraft& draft);

/// Allow iff the permission bit is 1 and end_time > now. Pure: `now` comes
/// from the caller.
Decision evaluate(const Policy& policy, const AccessRequest& request, std::int64_t now);

// Text form: `key=value` lines in the fixed order userId, role, department,
// recordId, allow, createTime, endTime.

std::string to_text(const Policy& policy);
std::string to_text(const PolicyDraft& draft);
/// Subject and object keys only; used to address a policy.
std::string key_text(const SubjectAttrs& subject, const ObjectAttrs& object);
/// Request form: the four key attributes plus requestedAt.
std::string to_text(const AccessRequest& request);

/// Groups with any missing or unparsable key come back as nullopt. Throws
/// Error(ParseError) for malformed lines, unknown keys or repeated keys.
PolicyDraft parse_policy_text(std::string_view text);
/// Throws Error(ParseError) unless every request key is present and valid.
AccessRequest parse_request_text(std::string_view text);
/// Parses stored canonical policy bytes (must pass check_policy).
Policy parse_policy(std::string_view text);

}  // namespace medledger::abac
