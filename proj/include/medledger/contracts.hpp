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
#include <vector>

#include "medledger/abac.hpp"
#include "medledger/content_store.hpp"
#include "medledger/ledger.hpp"
#include "medledger/membership.hpp"
#include "medledger/result.hpp"

namespace medledger::contracts {

inline constexpr std::string_view kValidRequest = "valid request!";

/// State key of a policy: hex of its id.
std::string policy_key(const Hash& policy_id);
/// State key of a record pointer: hex of SHA256(record_id).
std::string record_key(std::string_view record_id);
/// Marker written when a contract is deployed.
std::string contract_key(ContractId id);

// --- PSC ---------------------------------------------------------------------

ContractResult psc_add_policy(TxContext& ctx, const abac::PolicyDraft& policy,
                              const Identity& submitter);
ContractResult psc_delete_policy(TxContext& ctx, const abac::SubjectAttrs& subject,
                                 const abac::ObjectAttrs& object, const Identity& submitter);
ContractResult psc_update_policy(TxContext& ctx, const abac::PolicyDraft& policy,
                                 const Identity& submitter);
std::optional<abac::Policy> psc_query_policy(const TxContext& ctx, const abac::SubjectAttrs& subject,
                                             const abac::ObjectAttrs& object);

// --- ASC ---------------------------------------------------------------------

/// Looks up the (subject, object) policy and applies the decision rule at
/// `now`. An expired policy is deleted as part of the same transaction; that
/// is the only write this contract ever makes.
ContractResult asc_check_access(TxContext& ctx, const abac::AccessRequest& request,
                                std::int64_t now);

// --- RSC ---------------------------------------------------------------------
// Content goes to the store before ordering; only addresses reach the chain.

ContractResult rsc_add_record(TxContext& ctx, const std::string& record_id,
                              const ContentAddress& address);
/// Overwrites the pointer; the previous blob is appended to `released`.
ContractResult rsc_update_record(TxContext& ctx, const std::string& record_id,
                                 const ContentAddress& address,
                                 std::vector<ContentAddress>& released);
/// Tombstones the pointer; the blob is appended to `released`.
ContractResult rsc_delete_record(TxContext& ctx, const std::string& record_id,
                                 std::vector<ContentAddress>& released);
std::optional<ContentAddress> rsc_lookup(const TxContext& ctx, const std::string& record_id);
/// Resolves the pointer and fetches the blob; the payload carries the bytes.
ContractResult rsc_query_record(const TxContext& ctx, const ContentStore& store,
                                const std::string& record_id);

// --- dispatch ----------------------------------------------------------------

/// True for methods that never need ordering: QueryPolicy, QueryRecord, Ping.
/// CheckAccess is read-only unless it finds an expired policy.
bool is_query(ContractId contract, std::string_view method);

/// Executes transactions addressed as `<contract>.<method>`:
/// PSC.{AddPolicy,DeletePolicy,UpdatePolicy,QueryPolicy}, ASC.CheckAccess,
/// RSC.{AddRecord,DeleteRecord,UpdateRecord,QueryRecord}, plus `Ping` on
/// each contract and the deploy transaction that installs it.
///
/// RSC.QueryRecord returns the pointer text; resolving it against the
/// content store is the caller's job.
class ContractHost : public TxExecutor {
 public:
  explicit ContractHost(const CertificateAuthority& ca) : ca_(ca) {}

  TxOutcome execute(const Transaction& tx, const WorldState& state,
                    std::int64_t block_time) override;

 private:
  ContractResult dispatch(const Transaction& tx, const Identity& submitter, TxContext& ctx,
                          std::int64_t block_time, std::vector<ContentAddress>& released);

  const CertificateAuthority& ca_;
};

}  // namespace medledger::contracts
