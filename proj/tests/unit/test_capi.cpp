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

#include <algorithm>
#include <cstring>
#include <string>

#include "doctest.h"
#include "medledger/medledger.h"
#include "test_support.hpp"

namespace {

struct Buf {
  ml_buffer b{nullptr, 0};
  ~Buf() { ml_buffer_free(&b); }
  std::string str() const { return b.data ? std::string(reinterpret_cast<char*>(b.data), b.len) : ""; }
};

const char* kKey = "userId=d001\nrole=doctor\ndepartment=cardiology\nrecordId=r42\n";
const char* kRequest = "userId=d001\nrole=doctor\ndepartment=cardiology\nrecordId=r42\n";

std::string policy_text(long end) {
  return std::string(kKey) + "allow=1\ncreateTime=0\nendTime=" + std::to_string(end) + "\n";
}

}  // namespace

TEST_CASE("status names") {
  CHECK(std::string(ml_status_name(ML_OK)) == "Ok");
  CHECK(std::string(ml_status_name(ML_NO_POLICY)) == "NoPolicy");
  CHECK(std::string(ml_status_name(ML_AUTH_FAILED)) == "AuthFailed");
  CHECK(std::string(ml_status_name(ML_INTERNAL)) == "Internal");
  CHECK(std::string(ml_status_name(static_cast<ml_status>(999))) == "Unknown");
}

TEST_CASE("null handles are rejected") {
  ml_node* node = nullptr;
  CHECK(ml_node_init(nullptr, nullptr, &node) == ML_INVALID_ARGUMENT);
  CHECK(ml_policy_add(nullptr, "admin", "x") == ML_INVALID_ARGUMENT);
  CHECK(ml_record_add(nullptr, "admin", "r", nullptr, 0) == ML_INVALID_ARGUMENT);
  ml_node_close(nullptr);
  ml_buffer_free(nullptr);
}

TEST_CASE("end to end through the C API") {
  medledger::testing::TempDir dir("capi");
  ml_node* node = nullptr;
  REQUIRE(ml_node_init(dir.path().c_str(), "batch_timeout_ms = 20\n", &node) == ML_OK);
  REQUIRE(node != nullptr);
  CHECK(ml_identity_register(node, "d001", "doctor", "cardiology") == ML_OK);
  CHECK(ml_identity_register(node, "d001", "doctor", "cardiology") == ML_DUPLICATE_IDENTITY);
  CHECK(ml_identity_register(node, "x", "nurse", "cardiology") == ML_INVALID_ARGUMENT);

  const char content[] = "blood pressure 120/80";
  auto* bytes = reinterpret_cast<const uint8_t*>(content);
  CHECK(ml_record_add(node, "admin", "r42", bytes, std::strlen(content)) == ML_OK);

  Buf msg;
  CHECK(ml_access_check(node, "d001", kRequest, &msg.b) == ML_NO_POLICY);
  CHECK(std::string(ml_last_error()).size() > 0);

  CHECK(ml_policy_add(node, "d001", policy_text(1L << 40).c_str()) == ML_AUTH_FAILED);
  CHECK(ml_policy_add(node, "admin", policy_text(1L << 40).c_str()) == ML_OK);
  CHECK(ml_policy_add(node, "admin", policy_text(1L << 40).c_str()) == ML_EXISTS);
  CHECK(ml_policy_add(node, "nobody", policy_text(1L << 40).c_str()) == ML_AUTH_FAILED);

  Buf q;
  CHECK(ml_policy_query(node, "admin", kKey, &q.b) == ML_OK);
  CHECK(q.str().find("allow=1") != std::string::npos);

  Buf ok;
  CHECK(ml_access_check(node, "d001", kRequest, &ok.b) == ML_OK);
  CHECK(ok.str() == "valid request!");
  Buf rec;
  CHECK(ml_access_record(node, "d001", kRequest, &rec.b) == ML_OK);
  CHECK(rec.str() == content);
  CHECK(rec.b.data[rec.b.len] == 0);

  CHECK(ml_policy_update(node, "admin", (std::string(kKey) + "allow=0\ncreateTime=0\nendTime=99999999999\n").c_str()) ==
        ML_OK);
  CHECK(ml_access_check(node, "d001", kRequest, nullptr) == ML_DENIED);

  Buf key, hist;
  CHECK(ml_state_key_policy(kKey, &key.b) == ML_OK);
  CHECK(key.str() == "0995c16e88ec93ed977cdea9aaf486e5a1071df54a3e7c1e83add433db8c6306");
  CHECK(ml_ledger_history(node, key.str().c_str(), &hist.b) == ML_OK);
  const std::string lines = hist.str();
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);

  CHECK(ml_policy_delete(node, "admin", kKey) == ML_OK);
  Buf gone;
  CHECK(ml_policy_query(node, "admin", kKey, &gone.b) == ML_NO_POLICY);

  Buf got;
  CHECK(ml_record_query(node, "admin", "r42", &got.b) == ML_OK);
  CHECK(got.str() == content);
  CHECK(ml_record_update(node, "admin", "r42", bytes, 5) == ML_OK);
  CHECK(ml_record_delete(node, "admin", "r42") == ML_OK);
  CHECK(ml_record_delete(node, "admin", "r42") == ML_NOT_FOUND);

  int verified = 0;
  uint64_t height = 0;
  CHECK(ml_ledger_verify(node, &verified) == ML_OK);
  CHECK(verified == 1);
  CHECK(ml_ledger_height(node, &height) == ML_OK);
  CHECK(height > 1);
  ml_node_close(node);

  ml_node* again = nullptr;
  REQUIRE(ml_node_open(dir.path().c_str(), &again) == ML_OK);
  uint64_t height2 = 0;
  ml_ledger_height(again, &height2);
  CHECK(height2 == height);
  ml_node_close(again);

  CHECK(ml_node_init(dir.path().c_str(), nullptr, &again) == ML_CONFIG_ERROR);
}

TEST_CASE("bench entry points") {
  medledger::testing::TempDir dir("capi-bench");
  Buf csv;
  CHECK(ml_bench_load((dir.path() / "s").c_str(), "batch_timeout_ms = 10\n",
                      "client_counts = 2\nops = PSC.Add,PSC.Query\nops_per_client = 2\n", &csv.b) == ML_OK);
  CHECK(csv.str().rfind("op,clients,total_ms,ok_count,err_count,tps\n", 0) == 0);
  const std::string rows = csv.str();
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
  Buf bad;
  CHECK(ml_bench_load((dir.path() / "t").c_str(), nullptr, "ops = Nope\n", &bad.b) == ML_CONFIG_ERROR);

  Buf c, d;
  CHECK(ml_bench_consensus(1, "pow_difficulty_bits = 4\n", &c.b, &d.b) == ML_OK);
  CHECK(c.str().rfind("backend,node_count,round,millis\n", 0) == 0);
  CHECK(d.str()[0] == '#');
  Buf none;
  CHECK(ml_bench_consensus(0, nullptr, &none.b, nullptr) == ML_INVALID_ARGUMENT);
}
