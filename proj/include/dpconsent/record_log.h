// Copyright 2026 The DP Consent Pipeline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPCONSENT_RECORD_LOG_H_
#define DPCONSENT_RECORD_LOG_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace dpconsent {

// Append-only event journal in a directory:
//   events.jsonl   one JSON object per line, each with a strictly
//                  increasing "seq"; never rewritten.
//   snapshot.json  {"seq": N, "state": {...}} folded state up to N,
//                  replaced atomically through a temp file + rename.
// Appends are serialized, so the line order is the total order of events.
class RecordLog {
 public:
  static absl::StatusOr<std::unique_ptr<RecordLog>> Open(
      std::filesystem::path dir);

  struct Recovered {
    std::optional<nlohmann::json> snapshot_state;
    uint64_t snapshot_seq = 0;
    // Events after the snapshot, in log order.
    std::vector<nlohmann::json> events;
  };

  // Reads snapshot and log. A torn final line (crash during a write) is
  // dropped; a bad line anywhere else is a data-loss error.
  absl::StatusOr<Recovered> Recover() const;

  // Stamps event["seq"] and appends it. Returns the assigned seq.
  absl::StatusOr<uint64_t> Append(nlohmann::json event);

  absl::Status WriteSnapshot(uint64_t seq, const nlohmann::json& state);

  uint64_t last_seq() const;
  const std::filesystem::path& events_path() const { return events_path_; }
  const std::filesystem::path& snapshot_path() const { return snapshot_path_; }

 private:
  explicit RecordLog(std::filesystem::path dir);
  absl::Status DropTornTail();

  std::filesystem::path events_path_;
  std::filesystem::path snapshot_path_;
  mutable std::mutex mu_;
  std::ofstream out_;
  uint64_t last_seq_ = 0;
};

}  // namespace dpconsent

#endif  // DPCONSENT_RECORD_LOG_H_
