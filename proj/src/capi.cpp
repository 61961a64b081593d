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

#include "medledger/medledger.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"

#include "medledger/abac.hpp"
#include "medledger/bench.hpp"
#include "medledger/contracts.hpp"
#include "medledger/error.hpp"
#include "medledger/node.hpp"

struct ml_node {
  std::unique_ptr<medledger::Node> impl;
};

namespace {

using medledger::Bytes;
using medledger::ContractId;
using medledger::ContractResult;
using medledger::Errc;
using medledger::Error;

thread_local std::string last_error;

ml_status to_status(Errc code) { return static_cast<ml_status>(static_cast<int>(code) + 1); }

ml_status fail(Errc code, std::string message) {
  last_error = std::move(message);
  return to_status(code);
}

ml_status from_result(const ContractResult& r) {
  if (r.ok()) {
    last_error.clear();
    return ML_OK;
  }
  return fail(r.code.value_or(Errc::Internal), r.message);
}

void fill(ml_buffer* out, const void* data, std::size_t len) {
  if (!out) return;
  out->data = static_cast<uint8_t*>(std::malloc(len + 1));
  if (!out->data) throw std::bad_alloc();
  if (len) std::memcpy(out->data, data, len);
  out->data[len] = 0;
  out->len = len;
}

void fill(ml_buffer* out, const std::string& text) { fill(out, text.data(), text.size()); }
void fill(ml_buffer* out, const Bytes& bytes) { fill(out, bytes.data(), bytes.size()); }

void clear(ml_buffer* out) {
  if (out) *out = ml_buffer{nullptr, 0};
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

template <typename F>
ml_status guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(Errc::Internal, e.what());
  } catch (...) {
    return fail(Errc::Internal, "unknown exception");
  }
}

medledger::Identity signer(ml_node* node, const char* identity) {
  auto id = node->impl->local_identity(str(identity));
  if (!id) throw Error(Errc::AuthFailed, "no local key for identity '" + str(identity) + "'");
  return *id;
}

ml_status invoke(ml_node* node, const char* identity, ContractId contract, const char* method,
                 std::vector<Bytes> args, ml_buffer* out) {
  clear(out);
  if (!node) return fail(Errc::InvalidArgument, "null node");
  return guarded([&] {
    auto r = node->impl->invoke(signer(node, identity), contract, method, std::move(args));
    if (r.ok()) fill(out, r.payload);
    return from_result(r);
  });
}

std::vector<Bytes> text_arg(const char* text) { return {medledger::to_bytes(str(text))}; }

medledger::NetworkConfig network_config(const char* text) {
  return text ? medledger::NetworkConfig::parse(text) : medledger::NetworkConfig{};
}

}  // namespace

extern "C" {

const char* ml_status_name(ml_status status) {
  if (status == ML_OK) return "Ok";
  if (status < ML_OK || status > ML_INTERNAL) return "Unknown";
  return medledger::errc_name(static_cast<Errc>(static_cast<int>(status) - 1)).data();
}

const char* ml_last_error(void) { return last_error.c_str(); }

void ml_buffer_free(ml_buffer* buf) {
  if (!buf) return;
  std::free(buf->data);
  *buf = ml_buffer{nullptr, 0};
}

ml_status ml_node_init(const char* data_dir, const char* config_text, ml_node** out) {
  if (!data_dir || !out) return fail(Errc::InvalidArgument, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto node = medledger::Node::bootstrap(data_dir, network_config(config_text));
    *out = new ml_node{std::move(node)};
    return ML_OK;
  });
}

ml_status ml_node_open(const char* data_dir, ml_node** out) {
  if (!data_dir || !out) return fail(Errc::InvalidArgument, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ml_node{medledger::Node::open(data_dir)};
    return ML_OK;
  });
}

void ml_node_close(ml_node* node) {
  if (!node) return;
  try {
    node->impl->shutdown();
  } catch (...) {
  }
  delete node;
}

ml_status ml_identity_register(ml_node* node, const char* user_id, const char* role,
                               const char* department) {
  if (!node) return fail(Errc::InvalidArgument, "null node");
  return guarded([&] {
    auto r = medledger::parse_role(str(role));
    if (!r) return fail(Errc::InvalidArgument, "unknown role '" + str(role) + "'");
    node->impl->register_identity(str(user_id), *r, str(department));
    return ML_OK;
  });
}

ml_status ml_policy_add(ml_node* node, const char* identity, const char* policy_text) {
  return invoke(node, identity, ContractId::PSC, "AddPolicy", text_arg(policy_text), nullptr);
}

ml_status ml_policy_update(ml_node* node, const char* identity, const char* policy_text) {
  return invoke(node, identity, ContractId::PSC, "UpdatePolicy", text_arg(policy_text), nullptr);
}

ml_status ml_policy_delete(ml_node* node, const char* identity, const char* key_text) {
  return invoke(node, identity, ContractId::PSC, "DeletePolicy", text_arg(key_text), nullptr);
}

ml_status ml_policy_query(ml_node* node, const char* identity, const char* key_text,
                          ml_buffer* out) {
  return invoke(node, identity, ContractId::PSC, "QueryPolicy", text_arg(key_text), out);
}

ml_status ml_record_add(ml_node* node, const char* identity, const char* record_id,
                        const uint8_t* data, size_t len) {
  if (!node || (!data && len)) return fail(Errc::InvalidArgument, "null argument");
  return guarded([&] {
    return from_result(node->impl->add_record(signer(node, identity), str(record_id), {data, len}));
  });
}

ml_status ml_record_update(ml_node* node, const char* identity, const char* record_id,
                           const uint8_t* data, size_t len) {
  if (!node || (!data && len)) return fail(Errc::InvalidArgument, "null argument");
  return guarded([&] {
    return from_result(
        node->impl->update_record(signer(node, identity), str(record_id), {data, len}));
  });
}

ml_status ml_record_delete(ml_node* node, const char* identity, const char* record_id) {
  return invoke(node, identity, ContractId::RSC, "DeleteRecord", text_arg(record_id), nullptr);
}

ml_status ml_record_query(ml_node* node, const char* identity, const char* record_id,
                          ml_buffer* out) {
  return invoke(node, identity, ContractId::RSC, "QueryRecord", text_arg(record_id), out);
}

ml_status ml_access_check(ml_node* node, const char* identity, const char* request_text,
                          ml_buffer* out) {
  clear(out);
  if (!node) return fail(Errc::InvalidArgument, "null node");
  return guarded([&] {
    auto r = node->impl->invoke(signer(node, identity), ContractId::ASC, "CheckAccess",
                                text_arg(request_text));
    if (r.ok()) fill(out, r.message);
    return from_result(r);
  });
}

ml_status ml_access_record(ml_node* node, const char* identity, const char* request_text,
                           ml_buffer* out) {
  clear(out);
  if (!node) return fail(Errc::InvalidArgument, "null node");
  return guarded([&] {
    auto req = medledger::abac::parse_request_text(str(request_text));
    auto r = node->impl->access_record(signer(node, identity), req);
    if (r.ok()) fill(out, r.payload);
    return from_result(r);
  });
}

ml_status ml_ledger_verify(ml_node* node, int* ok) {
  if (!node || !ok) return fail(Errc::InvalidArgument, "null argument");
  return guarded([&] {
    *ok = node->impl->verify_chain() ? 1 : 0;
    return ML_OK;
  });
}

ml_status ml_ledger_height(ml_node* node, uint64_t* height) {
  if (!node || !height) return fail(Errc::InvalidArgument, "null argument");
  *height = node->impl->ledger().block_count();
  return ML_OK;
}

ml_status ml_ledger_history(ml_node* node, const char* state_key, ml_buffer* out) {
  clear(out);
  if (!node || !state_key) return fail(Errc::InvalidArgument, "null argument");
  return guarded([&] {
    std::string lines;
    for (const auto& h : node->impl->ledger().get_history(state_key)) {
      nlohmann::json row{{"height", h.version.height},
                         {"tx_index", h.version.tx_index},
                         {"tx_id", medledger::to_hex(h.tx_id)},
                         {"deleted", h.deleted}};
      row["value"] = h.deleted ? nlohmann::json(nullptr) : nlohmann::json(medledger::to_string(h.value));
      lines += row.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
      lines += '\n';
    }
    fill(out, lines);
    return ML_OK;
  });
}

ml_status ml_state_key_policy(const char* key_text, ml_buffer* out) {
  clear(out);
  return guarded([&] {
    auto draft = medledger::abac::parse_policy_text(str(key_text));
    if (!draft.subject || !draft.object || !draft.subject->valid() || !draft.object->valid()) {
      return fail(Errc::InvalidArgument, "key text needs userId, role, department and recordId");
    }
    fill(out, medledger::contracts::policy_key(medledger::abac::policy_id(*draft.subject, *draft.object)));
    return ML_OK;
  });
}

ml_status ml_state_key_record(const char* record_id, ml_buffer* out) {
  clear(out);
  if (!record_id) return fail(Errc::InvalidArgument, "null argument");
  return guarded([&] {
    fill(out, medledger::contracts::record_key(record_id));
    return ML_OK;
  });
}

ml_status ml_bench_load(const char* scratch_dir, const char* config_text, const char* profile_text,
                        ml_buffer* csv) {
  clear(csv);
  if (!scratch_dir) return fail(Errc::InvalidArgument, "null argument");
  return guarded([&] {
    auto profile = profile_text ? medledger::bench::LoadProfile::parse(profile_text)
                                : medledger::bench::LoadProfile{};
    auto node = medledger::bench::make_scratch_node(scratch_dir, network_config(config_text));
    auto rows = medledger::bench::run_load(profile, *node);
    node->shutdown();
    std::ostringstream out;
    medledger::bench::write_load_csv(out, rows);
    fill(csv, out.str());
    return ML_OK;
  });
}

ml_status ml_bench_consensus(unsigned rounds, const char* config_text, ml_buffer* csv,
                             ml_buffer* dat) {
  clear(csv);
  clear(dat);
  if (rounds == 0) return fail(Errc::InvalidArgument, "rounds must be >= 1");
  return guarded([&] {
    auto cfg = network_config(config_text).ordering;
    auto cmp = medledger::bench::run_consensus_compare(rounds, cfg);
    std::ostringstream c, d;
    medledger::bench::write_consensus_compare_csv(c, cmp);
    medledger::bench::write_gnuplot_data(d, cmp);
    fill(csv, c.str());
    fill(dat, d.str());
    return ML_OK;
  });
}

}  // extern "C"
