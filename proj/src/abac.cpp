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

#include "medledger/abac.hpp"

#include <charconv>
#include <map>

#include "medledger/codec.hpp"
#include "medledger/crypto.hpp"
#include "medledger/error.hpp"

namespace medledger::abac {
namespace {

constexpr std::string_view kKeys[] = {"userId", "role",       "department", "recordId",
                                      "allow",  "createTime", "endTime",    "requestedAt"};

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::map<std::string, std::string, std::less<>> split_lines(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::ParseError, "expected key=value, got '" + std::string(line) + "'");
    }
    std::string key(line.substr(0, eq));
    bool known = false;
    for (auto k : kKeys) known = known || k == key;
    if (!known) throw Error(Errc::ParseError, "unknown attribute '" + key + "'");
    if (!kv.emplace(key, std::string(line.substr(eq + 1))).second) {
      throw Error(Errc::ParseError, "attribute '" + key + "' given twice");
    }
  }
  return kv;
}

std::optional<SubjectAttrs> subject_from(const auto& kv) {
  auto u = kv.find("userId"), r = kv.find("role"), d = kv.find("department");
  if (u == kv.end() || r == kv.end() || d == kv.end()) return std::nullopt;
  auto role = parse_role(r->second);
  if (!role) return std::nullopt;
  return SubjectAttrs{u->second, *role, d->second};
}

std::optional<ObjectAttrs> object_from(const auto& kv) {
  auto it = kv.find("recordId");
  if (it == kv.end()) return std::nullopt;
  return ObjectAttrs{it->second};
}

void append(std::string& out, std::string_view key, std::string_view value) {
  out.append(key).append("=").append(value).append("\n");
}

}  // namespace

bool single_line(std::string_view s) { return s.find_first_of("\r\n") == std::string_view::npos; }

bool SubjectAttrs::valid() const {
  return !user_id.empty() && !department.empty() && single_line(user_id) &&
         single_line(department) && (role == Role::doctor || role == Role::patient);
}

bool ObjectAttrs::valid() const { return !record_id.empty() && single_line(record_id); }

bool check_policy(const PolicyDraft& c) {
  return c.subject && c.object && c.permission && c.environment && c.subject->valid() &&
         c.object->valid() && c.permission->valid() && c.environment->valid();
}

Bytes canonical_subject(const SubjectAttrs& s) {
  Writer w;
  w.str(s.user_id).str(role_name(s.role)).str(s.department);
  return std::move(w).data();
}

Bytes canonical_object(const ObjectAttrs& o) {
  Writer w;
  w.str(o.record_id);
  return std::move(w).data();
}

Hash policy_id(const SubjectAttrs& subject, const ObjectAttrs& object) {
  crypto::Sha256 h;
  h.update(canonical_subject(subject)).update(canonical_object(object));
  return h.finish();
}

std::optional<Policy> make_policy(const PolicyDraft& draft) {
  if (!check_policy(draft)) return std::nullopt;
  Policy p{*draft.subject, *draft.object, *draft.permission, *draft.environment, {}};
  p.id = policy_id(p.subject, p.object);
  return p;
}

Decision evaluate(const Policy& policy, const AccessRequest&, std::int64_t now) {
  return policy.permission.allow == 1 && policy.environment.end_time > now ? Decision::Allow
                                                                           : Decision::Deny;
}

std::string key_text(const SubjectAttrs& subject, const ObjectAttrs& object) {
  std::string out;
  append(out, "userId", subject.user_id);
  append(out, "role", role_name(subject.role));
  append(out, "department", subject.department);
  append(out, "recordId", object.record_id);
  return out;
}

std::string to_text(const Policy& policy) { return to_text(policy.draft()); }

std::string to_text(const PolicyDraft& d) {
  std::string out;
  if (d.subject) {
    append(out, "userId", d.subject->user_id);
    append(out, "role", role_name(d.subject->role));
    append(out, "department", d.subject->department);
  }
  if (d.object) append(out, "recordId", d.object->record_id);
  if (d.permission) append(out, "allow", std::to_string(d.permission->allow));
  if (d.environment) {
    append(out, "createTime", std::to_string(d.environment->create_time));
    append(out, "endTime", std::to_string(d.environment->end_time));
  }
  return out;
}

std::string to_text(const AccessRequest& request) {
  std::string out = key_text(request.subject, request.object);
  append(out, "requestedAt", std::to_string(request.requested_at));
  return out;
}

PolicyDraft parse_policy_text(std::string_view text) {
  auto kv = split_lines(text);
  PolicyDraft d;
  d.subject = subject_from(kv);
  d.object = object_from(kv);
  if (auto a = kv.find("allow"); a != kv.end()) {
    if (auto v = parse_int(a->second); v && *v >= INT32_MIN && *v <= INT32_MAX) {
      d.permission = PermissionAttr{static_cast<int>(*v)};
    }
  }
  auto c = kv.find("createTime"), e = kv.find("endTime");
  if (c != kv.end() && e != kv.end()) {
    auto cv = parse_int(c->second), ev = parse_int(e->second);
    if (cv && ev) d.environment = EnvironmentAttrs{*cv, *ev};
  }
  return d;
}

AccessRequest parse_request_text(std::string_view text) {
  auto kv = split_lines(text);
  auto subject = subject_from(kv);
  auto object = object_from(kv);
  if (!subject || !object) throw Error(Errc::ParseError, "request lacks subject or object attributes");
  AccessRequest req{*subject, *object, 0};
  if (auto t = kv.find("requestedAt"); t != kv.end()) {
    auto v = parse_int(t->second);
    if (!v) throw Error(Errc::ParseError, "requestedAt is not an integer");
    req.requested_at = *v;
  }
  return req;
}

Policy parse_policy(std::string_view text) {
  auto p = make_policy(parse_policy_text(text));
  if (!p) throw Error(Errc::ParseError, "stored policy fails validation");
  return *p;
}

}  // namespace medledger::abac
