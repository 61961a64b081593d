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

#include "medledger/contracts.hpp"

#include "medledger/crypto.hpp"
#include "medledger/error.hpp"

namespace medledger::contracts {
namespace {

ContractResult not_admin(const Identity& submitter) {
  return ContractResult::failure(Errc::NotAdmin, "identity '" + submitter.user_id +
                                                     "' is not an administrator");
}

void remove_policy(TxContext& ctx, const Hash& id) { ctx.delete_state(policy_key(id)); }

}  // namespace

std::string policy_key(const Hash& policy_id) { return to_hex(policy_id); }

std::string record_key(std::string_view record_id) {
  return to_hex(crypto::sha256(as_view(record_id)));
}

std::string contract_key(ContractId id) { return "contract/" + std::string(contract_name(id)); }

ContractResult psc_add_policy(TxContext& ctx, const abac::PolicyDraft& draft,
                              const Identity& submitter) {
  if (submitter.role != Role::admin) return not_admin(submitter);
  auto policy = abac::make_policy(draft);
  if (!policy) return ContractResult::failure(Errc::BadPolicy, "BadPolicy");
  auto key = policy_key(policy->id);
  if (ctx.find_state(key)) {
    return ContractResult::failure(Errc::Exists, "policy " + key + " already exists");
  }
  ctx.put_state(key, to_bytes(abac::to_text(*policy)));
  return ContractResult::success("policy " + key + " added", to_bytes(key));
}

ContractResult psc_delete_policy(TxContext& ctx, const abac::SubjectAttrs& subject,
                                 const abac::ObjectAttrs& object, const Identity& submitter) {
  if (submitter.role != Role::admin) return not_admin(submitter);
  Hash id = abac::policy_id(subject, object);
  if (!ctx.find_state(policy_key(id))) {
    return ContractResult::failure(Errc::NotFound, "no policy " + policy_key(id));
  }
  remove_policy(ctx, id);
  return ContractResult::success("policy " + policy_key(id) + " deleted");
}

ContractResult psc_update_policy(TxContext& ctx, const abac::PolicyDraft& draft,
                                 const Identity& submitter) {
  if (submitter.role != Role::admin) return not_admin(submitter);
  auto policy = abac::make_policy(draft);
  if (!policy) return ContractResult::failure(Errc::BadPolicy, "BadPolicy");
  auto key = policy_key(policy->id);
  if (!ctx.find_state(key)) return ContractResult::failure(Errc::NotFound, "no policy " + key);
  // Delete then add again under the same id; the write set keeps the last.
  remove_policy(ctx, policy->id);
  ctx.put_state(key, to_bytes(abac::to_text(*policy)));
  return ContractResult::success("policy " + key + " updated", to_bytes(key));
}

std::optional<abac::Policy> psc_query_policy(const TxContext& ctx, const abac::SubjectAttrs& subject,
                                             const abac::ObjectAttrs& object) {
  auto stored = ctx.find_state(policy_key(abac::policy_id(subject, object)));
  if (!stored) return std::nullopt;
  return abac::parse_policy(to_string(*stored));
}

ContractResult asc_check_access(TxContext& ctx, const abac::AccessRequest& request,
                                std::int64_t now) {
  if (!request.subject.valid() || !request.object.valid()) {
    return ContractResult::failure(Errc::InvalidArgument, "incomplete access request");
  }
  auto policy = psc_query_policy(ctx, request.subject, request.object);
  if (!policy) return ContractResult::failure(Errc::NoPolicy, "no policy");
  if (policy->environment.end_time <= now) {
    remove_policy(ctx, policy->id);
    return ContractResult::failure(Errc::Expired, "policy expired");
  }
  if (abac::evaluate(*policy, request, now) == abac::Decision::Allow) {
    return ContractResult::success(std::string(kValidRequest));
  }
  return ContractResult::failure(Errc::Denied, "access denied");
}

ContractResult rsc_add_record(TxContext& ctx, const std::string& record_id,
                              const ContentAddress& address) {
  if (record_id.empty()) return ContractResult::failure(Errc::InvalidArgument, "empty record id");
  auto key = record_key(record_id);
  if (ctx.find_state(key)) {
    return ContractResult::failure(Errc::Exists, "record '" + record_id + "' already exists");
  }
  ctx.put_state(key, to_bytes(address.text()));
  return ContractResult::success(address.text(), to_bytes(address.text()));
}

std::optional<ContentAddress> rsc_lookup(const TxContext& ctx, const std::string& record_id) {
  auto stored = ctx.find_state(record_key(record_id));
  if (!stored) return std::nullopt;
  auto address = ContentAddress::parse(to_string(*stored));
  if (!address) throw Error(Errc::Internal, "malformed pointer for record '" + record_id + "'");
  return address;
}

ContractResult rsc_update_record(TxContext& ctx, const std::string& record_id,
                                 const ContentAddress& address,
                                 std::vector<ContentAddress>& released) {
  auto old = rsc_lookup(ctx, record_id);
  if (!old) return ContractResult::failure(Errc::NotFound, "no record '" + record_id + "'");
  ctx.put_state(record_key(record_id), to_bytes(address.text()));
  if (*old != address) released.push_back(*old);
  return ContractResult::success(address.text(), to_bytes(address.text()));
}

ContractResult rsc_delete_record(TxContext& ctx, const std::string& record_id,
                                 std::vector<ContentAddress>& released) {
  auto old = rsc_lookup(ctx, record_id);
  if (!old) return ContractResult::failure(Errc::NotFound, "no record '" + record_id + "'");
  ctx.delete_state(record_key(record_id));
  released.push_back(*old);
  return ContractResult::success("record '" + record_id + "' deleted");
}

ContractResult rsc_query_record(const TxContext& ctx, const ContentStore& store,
                                const std::string& record_id) {
  auto address = rsc_lookup(ctx, record_id);
  if (!address) return ContractResult::failure(Errc::NotFound, "no record '" + record_id + "'");
  try {
    return ContractResult::success(address->text(), store.get(*address));
  } catch (const Error& e) {
    return ContractResult::failure(e.code(), e.what());
  }
}

bool is_query(ContractId contract, std::string_view method) {
  if (method == "Ping") return true;
  switch (contract) {
    case ContractId::PSC: return method == "QueryPolicy";
    case ContractId::RSC: return method == "QueryRecord";
    case ContractId::ASC: return false;
  }
  return false;
}

namespace {

const Bytes& arg(const Transaction& tx, std::size_t i) {
  if (i >= tx.args.size()) {
    throw Error(Errc::InvalidArgument, tx.method + " expects at least " + std::to_string(i + 1) +
                                           " argument(s)");
  }
  return tx.args[i];
}

ContentAddress address_arg(const Transaction& tx, std::size_t i) {
  auto a = ContentAddress::parse(to_string(arg(tx, i)));
  if (!a) throw Error(Errc::InvalidArgument, "malformed content address");
  return *a;
}

}  // namespace

TxOutcome ContractHost::execute(const Transaction& tx, const WorldState& state,
                                std::int64_t block_time) {
  TxOutcome out;
  out.tx_id = tx.tx_id;
  TxContext ctx(state);
  auto submitter = ca_.lookup(tx.submitter);
  if (!submitter) {
    out.result = ContractResult::failure(Errc::UnknownSigner, "unknown submitter " + tx.submitter);
    return out;
  }
  try {
    out.result = dispatch(tx, *submitter, ctx, block_time, out.released_blobs);
  } catch (const Error& e) {
    Errc code = e.code() == Errc::ParseError ? Errc::InvalidArgument : e.code();
    out.result = ContractResult::failure(code, e.what());
  }
  // Failed transactions leave no trace in state, except an expired policy
  // which is removed even though the access is refused.
  if (out.result.ok() || out.result.code == Errc::Expired) {
    out.writes = ctx.take_writes();
  } else {
    out.released_blobs.clear();
  }
  return out;
}

ContractResult ContractHost::dispatch(const Transaction& tx, const Identity& submitter,
                                      TxContext& ctx, std::int64_t block_time,
                                      std::vector<ContentAddress>& released) {
  const std::string deployed_key = contract_key(tx.contract);
  if (tx.kind == TxKind::deploy) {
    if (submitter.role != Role::admin) return not_admin(submitter);
    if (ctx.find_state(deployed_key)) {
      return ContractResult::failure(Errc::Exists, std::string(contract_name(tx.contract)) +
                                                       " already deployed");
    }
    ctx.put_state(deployed_key, to_bytes("1"));
    return ContractResult::success(std::string(contract_name(tx.contract)) + " initialized");
  }
  if (!ctx.find_state(deployed_key)) {
    return ContractResult::failure(Errc::NotFound, std::string(contract_name(tx.contract)) +
                                                       " is not deployed");
  }
  const std::string& m = tx.method;
  if (m == "Ping") return ContractResult::success("pong");

  switch (tx.contract) {
    case ContractId::PSC: {
      if (m == "AddPolicy") {
        return psc_add_policy(ctx, abac::parse_policy_text(to_string(arg(tx, 0))), submitter);
      }
      if (m == "UpdatePolicy") {
        return psc_update_policy(ctx, abac::parse_policy_text(to_string(arg(tx, 0))), submitter);
      }
      if (m == "DeletePolicy" || m == "QueryPolicy") {
        auto key = abac::parse_policy_text(to_string(arg(tx, 0)));
        if (!key.subject || !key.object) {
          return ContractResult::failure(Errc::InvalidArgument, "policy key needs subject and object");
        }
        if (m == "DeletePolicy") return psc_delete_policy(ctx, *key.subject, *key.object, submitter);
        auto policy = psc_query_policy(ctx, *key.subject, *key.object);
        if (!policy) return ContractResult::failure(Errc::NoPolicy, "no policy");
        return ContractResult::success(policy_key(policy->id), to_bytes(abac::to_text(*policy)));
      }
      break;
    }
    case ContractId::ASC: {
      if (m == "CheckAccess") {
        return asc_check_access(ctx, abac::parse_request_text(to_string(arg(tx, 0))), block_time);
      }
      break;
    }
    case ContractId::RSC: {
      const std::string record_id = m.ends_with("Record") ? to_string(arg(tx, 0)) : std::string{};
      if (m == "AddRecord") return rsc_add_record(ctx, record_id, address_arg(tx, 1));
      if (m == "UpdateRecord") return rsc_update_record(ctx, record_id, address_arg(tx, 1), released);
      if (m == "DeleteRecord") return rsc_delete_record(ctx, record_id, released);
      if (m == "QueryRecord") {
        auto address = rsc_lookup(ctx, record_id);
        if (!address) return ContractResult::failure(Errc::NotFound, "no record '" + record_id + "'");
        return ContractResult::success(address->text(), to_bytes(address->text()));
      }
      break;
    }
  }
  return ContractResult::failure(Errc::InvalidArgument, "unknown method " +
                                                            std::string(contract_name(tx.contract)) +
                                                            "." + m);
}

}  // namespace medledger::contracts
