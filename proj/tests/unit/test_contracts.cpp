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
#include "medledger/contracts.hpp"
#include "medledger/error.hpp"
#include "test_support.hpp"

using namespace medledger;
using namespace medledger::contracts;
using abac::ObjectAttrs;
using abac::SubjectAttrs;

namespace {

abac::PolicyDraft draft(const std::string& user, const std::string& record, int allow, std::int64_t end) {
  return {SubjectAttrs{user, Role::doctor, "cardiology"}, ObjectAttrs{record}, abac::PermissionAttr{allow},
          abac::EnvironmentAttrs{0, end}};
}

struct Chain {
  WorldState state;
  std::uint64_t height = 0;

  // Runs `fn` in a fresh context and commits its writes as one transaction.
  template <typename Fn>
  ContractResult run(Fn&& fn) {
    TxContext ctx(state);
    ContractResult r = fn(ctx);
    Hash id{};
    id[0] = static_cast<std::uint8_t>(height);
    state.apply(ctx.take_writes(), Version{height++, 0}, id);
    return r;
  }
};

}  // namespace

TEST_CASE("policy lifecycle") {
  CertificateAuthority ca;
  auto admin = ca.register_identity("admin", Role::admin, "it");
  auto doctor = ca.register_identity("d001", Role::doctor, "cardiology");
  Chain c;

  auto added = c.run([&](TxContext& ctx) { return psc_add_policy(ctx, draft("d001", "r1", 1, 100), admin); });
  CHECK(added.ok());
  auto key = policy_key(abac::policy_id({"d001", Role::doctor, "cardiology"}, {"r1"}));
  CHECK(to_string(added.payload) == key);
  CHECK(c.state.get(key).has_value());

  auto dup = c.run([&](TxContext& ctx) { return psc_add_policy(ctx, draft("d001", "r1", 0, 5), admin); });
  CHECK(dup.code == Errc::Exists);

  auto not_admin = c.run([&](TxContext& ctx) { return psc_add_policy(ctx, draft("d001", "r2", 1, 9), doctor); });
  CHECK(not_admin.code == Errc::NotAdmin);

  auto bad = draft("d001", "r3", 7, 9);
  CHECK(c.run([&](TxContext& ctx) { return psc_add_policy(ctx, bad, admin); }).code == Errc::BadPolicy);

  CHECK(c.run([&](TxContext& ctx) { return psc_update_policy(ctx, draft("d001", "r1", 0, 500), admin); }).ok());
  TxContext view(c.state);
  auto q = psc_query_policy(view, {"d001", Role::doctor, "cardiology"}, {"r1"});
  REQUIRE(q);
  CHECK(q->permission.allow == 0);
  CHECK(q->environment.end_time == 500);
  CHECK(c.state.history(key).size() == 2);

  CHECK(c.run([&](TxContext& ctx) { return psc_update_policy(ctx, draft("d001", "zz", 1, 5), admin); }).code ==
        Errc::NotFound);
  SubjectAttrs s{"d001", Role::doctor, "cardiology"};
  CHECK(c.run([&](TxContext& ctx) { return psc_delete_policy(ctx, s, {"r1"}, doctor); }).code == Errc::NotAdmin);
  CHECK(c.run([&](TxContext& ctx) { return psc_delete_policy(ctx, s, {"r1"}, admin); }).ok());
  CHECK(c.run([&](TxContext& ctx) { return psc_delete_policy(ctx, s, {"r1"}, admin); }).code == Errc::NotFound);
  TxContext after(c.state);
  CHECK_FALSE(psc_query_policy(after, s, {"r1"}).has_value());
}

TEST_CASE("access decisions") {
  CertificateAuthority ca;
  auto admin = ca.register_identity("admin", Role::admin, "it");
  Chain c;
  c.run([&](TxContext& ctx) { return psc_add_policy(ctx, draft("d001", "allow", 1, 100), admin); });
  c.run([&](TxContext& ctx) { return psc_add_policy(ctx, draft("d001", "deny", 0, 100), admin); });
  SubjectAttrs s{"d001", Role::doctor, "cardiology"};

  auto check = [&](const std::string& record, std::int64_t now) {
    return c.run([&](TxContext& ctx) { return asc_check_access(ctx, {s, {record}, now}, now); });
  };
  auto ok = check("allow", 50);
  CHECK(ok.ok());
  CHECK(ok.message == kValidRequest);
  CHECK(check("deny", 50).code == Errc::Denied);
  CHECK(check("none", 50).code == Errc::NoPolicy);

  auto key = policy_key(abac::policy_id(s, {"allow"}));
  CHECK(check("allow", 100).code == Errc::Expired);
  CHECK_FALSE(c.state.get(key).has_value());
  CHECK(check("allow", 50).code == Errc::NoPolicy);

  SubjectAttrs bad{"", Role::doctor, "x"};
  CHECK(c.run([&](TxContext& ctx) { return asc_check_access(ctx, {bad, {"r"}, 0}, 0); }).code ==
        Errc::InvalidArgument);
}

TEST_CASE("record pointers") {
  testing::TempDir dir("rsc");
  ContentStore store(dir / "blobs");
  Chain c;
  auto v1 = store.put(as_view("version one"));
  auto v2 = store.put(as_view("version two"));
  std::vector<ContentAddress> released;

  CHECK(c.run([&](TxContext& ctx) { return rsc_add_record(ctx, "r1", v1); }).ok());
  CHECK(c.run([&](TxContext& ctx) { return rsc_add_record(ctx, "r1", v2); }).code == Errc::Exists);
  CHECK(c.state.get(record_key("r1")) == to_bytes(v1.text()));

  TxContext view(c.state);
  auto q = rsc_query_record(view, store, "r1");
  CHECK(q.ok());
  CHECK(q.payload == to_bytes("version one"));

  CHECK(c.run([&](TxContext& ctx) { return rsc_update_record(ctx, "r1", v2, released); }).ok());
  REQUIRE(released.size() == 1);
  CHECK(released[0] == v1);
  released.clear();
  CHECK(c.run([&](TxContext& ctx) { return rsc_update_record(ctx, "r1", v2, released); }).ok());
  CHECK(released.empty());
  CHECK(c.run([&](TxContext& ctx) { return rsc_update_record(ctx, "nope", v2, released); }).code ==
        Errc::NotFound);

  CHECK(c.run([&](TxContext& ctx) { return rsc_delete_record(ctx, "r1", released); }).ok());
  CHECK(released == std::vector<ContentAddress>{v2});
  CHECK(c.run([&](TxContext& ctx) { return rsc_delete_record(ctx, "r1", released); }).code == Errc::NotFound);
  TxContext gone(c.state);
  CHECK(rsc_query_record(gone, store, "r1").code == Errc::NotFound);
}

TEST_CASE("host dispatch") {
  CertificateAuthority ca;
  auto admin = ca.register_identity("admin", Role::admin, "it");
  auto doctor = ca.register_identity("d001", Role::doctor, "cardiology");
  ContractHost host(ca);
  WorldState ws;
  std::uint64_t h = 0, nonce = 0;
  auto exec = [&](const Identity& who, TxKind kind, ContractId id, std::string method,
                  std::vector<Bytes> args, std::int64_t now = 10) {
    auto tx = make_transaction(who, kind, id, std::move(method), std::move(args), now, nonce++);
    auto out = host.execute(tx, ws, now);
    ws.apply(out.writes, Version{h++, 0}, tx.tx_id);
    return out;
  };

  CHECK(exec(admin, TxKind::invoke, ContractId::PSC, "Ping", {}).result.code == Errc::NotFound);
  CHECK(exec(doctor, TxKind::deploy, ContractId::PSC, "Init", {}).result.code == Errc::NotAdmin);
  CHECK(exec(admin, TxKind::deploy, ContractId::PSC, "Init", {}).result.ok());
  CHECK(exec(admin, TxKind::deploy, ContractId::PSC, "Init", {}).result.code == Errc::Exists);
  CHECK(exec(admin, TxKind::deploy, ContractId::ASC, "Init", {}).result.ok());
  auto pong = exec(doctor, TxKind::invoke, ContractId::PSC, "Ping", {});
  CHECK(pong.result.ok());
  CHECK(pong.result.message == "pong");
  CHECK(pong.writes.empty());
  CHECK(exec(admin, TxKind::invoke, ContractId::PSC, "Frobnicate", {}).result.code == Errc::InvalidArgument);
  CHECK(exec(admin, TxKind::invoke, ContractId::PSC, "AddPolicy", {to_bytes("junk")}).result.code ==
        Errc::InvalidArgument);

  auto policy = abac::to_text(*abac::make_policy(draft("d001", "r1", 1, 20)));
  auto added = exec(admin, TxKind::invoke, ContractId::PSC, "AddPolicy", {to_bytes(policy)});
  CHECK(added.result.ok());
  CHECK(added.writes.size() == 1);
  auto failed = exec(admin, TxKind::invoke, ContractId::PSC, "AddPolicy", {to_bytes(policy)});
  CHECK(failed.result.code == Errc::Exists);
  CHECK(failed.writes.empty());

  abac::AccessRequest req{{"d001", Role::doctor, "cardiology"}, {"r1"}, 0};
  auto allowed = exec(doctor, TxKind::invoke, ContractId::ASC, "CheckAccess", {to_bytes(abac::to_text(req))}, 15);
  CHECK(allowed.result.message == kValidRequest);
  CHECK(allowed.writes.empty());
  auto expired = exec(doctor, TxKind::invoke, ContractId::ASC, "CheckAccess", {to_bytes(abac::to_text(req))}, 25);
  CHECK(expired.result.code == Errc::Expired);
  CHECK(expired.writes.size() == 1);
  CHECK(ws.live_keys() == 2);  // the two deploy markers
}

TEST_CASE("access contract agrees with a brute-force scan") {
  testing::Gen g(8);
  CertificateAuthority ca;
  auto admin = ca.register_identity("admin", Role::admin, "it");
  for (int instance = 0; instance < 200; ++instance) {
    Chain c;
    std::vector<abac::Policy> installed;
    for (int i = 0, n = static_cast<int>(g.range(0, 30)); i < n; ++i) {
      auto d = draft(g.ident(3, 1), g.ident(3, 1), static_cast<int>(g.range(0, 1)), g.range(0, 100));
      if (c.run([&](TxContext& ctx) { return psc_add_policy(ctx, d, admin); }).ok()) {
        installed.push_back(*abac::make_policy(d));
      }
    }
    SubjectAttrs s{g.ident(3, 1), Role::doctor, "cardiology"};
    ObjectAttrs o{g.ident(3, 1)};
    std::int64_t now = g.range(0, 110);
    std::optional<bool> expected;
    for (const auto& p : installed) {
      if (p.subject == s && p.object == o) expected = p.permission.allow == 1 && p.environment.end_time > now;
    }
    TxContext ctx(c.state);
    auto r = asc_check_access(ctx, {s, o, now}, now);
    if (!expected) {
      CHECK(r.code == Errc::NoPolicy);
    } else {
      CHECK(r.ok() == *expected);
    }
  }
}
