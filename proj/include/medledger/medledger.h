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

#ifndef MEDLEDGER_MEDLEDGER_H_
#define MEDLEDGER_MEDLEDGER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MEDLEDGER_BUILDING_LIBRARY)
#define ML_API __attribute__((visibility("default")))
#else
#define ML_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ml_node ml_node;

typedef enum ml_status {
  ML_OK = 0,
  ML_INVALID_ARGUMENT,
  ML_PARSE_ERROR,
  ML_IO,
  ML_CONFIG_ERROR,
  ML_DUPLICATE_IDENTITY,
  ML_UNKNOWN_SIGNER,
  ML_AUTH_FAILED,
  ML_STORE_ERROR,
  ML_NOT_FOUND,
  ML_CORRUPT_BLOB,
  ML_CHAIN_MISMATCH,
  ML_INVALID_BLOCK,
  ML_KEY_NOT_FOUND,
  ML_QUEUE_CLOSED,
  ML_DUPLICATE,
  ML_BAD_POLICY,
  ML_EXISTS,
  ML_NO_POLICY,
  ML_DENIED,
  ML_EXPIRED,
  ML_NOT_ADMIN,
  ML_INTERNAL
} ml_status;

/* Heap buffer owned by the caller; release with ml_buffer_free. The data is
   always followed by a NUL byte that is not counted in len. */
typedef struct ml_buffer {
  uint8_t* data;
  size_t len;
} ml_buffer;

/* "Ok", "NoPolicy", "Denied", ... */
ML_API const char* ml_status_name(ml_status status);
/* Message of the last failed call on this thread, or "". */
ML_API const char* ml_last_error(void);
ML_API void ml_buffer_free(ml_buffer* buf);

/* Creates a data directory with a genesis block and the "admin" identity.
   config_text may be NULL for defaults. */
ML_API ml_status ml_node_init(const char* data_dir, const char* config_text, ml_node** out);
ML_API ml_status ml_node_open(const char* data_dir, ml_node** out);
/* Drains pending transactions. Accepts NULL. */
ML_API void ml_node_close(ml_node* node);

/* role is "admin", "doctor" or "patient". The signing key lands in the
   node's wallet. */
ML_API ml_status ml_identity_register(ml_node* node, const char* user_id, const char* role,
                                      const char* department);

/* Every call below is signed by `identity`, a user whose key is in the
   node's wallet. */

/* policy_text: key=value lines (userId, role, department, recordId, allow,
   createTime, endTime). */
ML_API ml_status ml_policy_add(ml_node* node, const char* identity, const char* policy_text);
ML_API ml_status ml_policy_update(ml_node* node, const char* identity, const char* policy_text);
/* key_text: userId, role, department and recordId lines. */
ML_API ml_status ml_policy_delete(ml_node* node, const char* identity, const char* key_text);
/* ML_NO_POLICY when absent. `out` receives the stored policy text. */
ML_API ml_status ml_policy_query(ml_node* node, const char* identity, const char* key_text,
                                 ml_buffer* out);

ML_API ml_status ml_record_add(ml_node* node, const char* identity, const char* record_id,
                               const uint8_t* data, size_t len);
ML_API ml_status ml_record_update(ml_node* node, const char* identity, const char* record_id,
                                  const uint8_t* data, size_t len);
ML_API ml_status ml_record_delete(ml_node* node, const char* identity, const char* record_id);
/* `out` receives the record content. */
ML_API ml_status ml_record_query(ml_node* node, const char* identity, const char* record_id,
                                 ml_buffer* out);

/* request_text: policy key lines, optionally requestedAt. `out` (may be
   NULL) receives the contract message on success. */
ML_API ml_status ml_access_check(ml_node* node, const char* identity, const char* request_text,
                                 ml_buffer* out);
/* Access check followed by retrieval; `out` receives the record content. */
ML_API ml_status ml_access_record(ml_node* node, const char* identity, const char* request_text,
                                  ml_buffer* out);

/* *ok is 1 when every block, link and signature checks out. */
ML_API ml_status ml_ledger_verify(ml_node* node, int* ok);
ML_API ml_status ml_ledger_height(ml_node* node, uint64_t* height);
/* One JSON object per line: height, tx_index, tx_id, deleted, value. */
ML_API ml_status ml_ledger_history(ml_node* node, const char* state_key, ml_buffer* out);
/* World-state key of a policy (from key_text) or of a record id. */
ML_API ml_status ml_state_key_policy(const char* key_text, ml_buffer* out);
ML_API ml_status ml_state_key_record(const char* record_id, ml_buffer* out);

/* Load test against a fresh scratch directory. profile_text keys:
   client_counts, ops (comma lists), ops_per_client, payload_bytes.
   `csv` receives op,clients,total_ms,ok_count,err_count,tps rows. */
ML_API ml_status ml_bench_load(const char* scratch_dir, const char* config_text,
                               const char* profile_text, ml_buffer* csv);
/* Both ordering backends over 10..100 nodes. `csv` gets per-round samples,
   `dat` (may be NULL) the gnuplot means. */
ML_API ml_status ml_bench_consensus(unsigned rounds, const char* config_text, ml_buffer* csv,
                                    ml_buffer* dat);

#ifdef __cplusplus
}
#endif

#endif  // MEDLEDGER_MEDLEDGER_H_
