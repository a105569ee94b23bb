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

#include "dpconsent/record_log.h"

#include <iterator>
#include <string>
#include <system_error>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {
namespace {

absl::StatusOr<std::vector<std::string>> ReadLines(
    const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path, std::ios::binary);
  if (!in) return lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (in.bad()) {
    return absl::DataLossError(absl::StrCat("cannot read ", path.string()));
  }
  return lines;
}

}  // namespace

RecordLog::RecordLog(std::filesystem::path dir)
    : events_path_(dir / "events.jsonl"),
      snapshot_path_(dir / "snapshot.json") {}

absl::StatusOr<std::unique_ptr<RecordLog>> RecordLog::Open(
    std::filesystem::path dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat(
        "cannot create storage directory ", dir.string(), ": ", ec.message()));
  }
  std::unique_ptr<RecordLog> log(new RecordLog(dir));
  absl::StatusOr<Recovered> existing = log->Recover();
  if (!existing.ok()) return existing.status();
  if (!existing->events.empty()) {
    log->last_seq_ = existing->events.back()["seq"].get<uint64_t>();
  } else {
    log->last_seq_ = existing->snapshot_seq;
  }
  if (absl::Status s = log->DropTornTail(); !s.ok()) return s;
  log->out_.open(log->events_path_, std::ios::binary | std::ios::app);
  if (!log->out_) {
    return absl::UnavailableError(
        absl::StrCat("cannot open ", log->events_path_.string()));
  }
  return log;
}

// An interrupted append leaves a partial last line. Cutting it off keeps
// the next append from burying it mid-file, where recovery would reject it.
absl::Status RecordLog::DropTornTail() {
  std::error_code ec;
  if (!std::filesystem::exists(events_path_, ec)) return absl::OkStatus();
  std::string bytes;
  {
    std::ifstream in(events_path_, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>());
  }
  size_t keep = bytes.size();
  if (keep > 0 && bytes[keep - 1] != '\n') {
    const size_t nl = bytes.rfind('\n');
    keep = nl == std::string::npos ? 0 : nl + 1;
  } else if (keep > 1) {
    const size_t nl = bytes.rfind('\n', keep - 2);
    const size_t start = nl == std::string::npos ? 0 : nl + 1;
    const nlohmann::json last = nlohmann::json::parse(
        bytes.substr(start, keep - 1 - start), nullptr, false);
    if (last.is_discarded() || !last.is_object()) keep = start;
  }
  if (keep == bytes.size()) return absl::OkStatus();
  std::filesystem::resize_file(events_path_, keep, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot truncate ", events_path_.string(), ": ",
                     ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<RecordLog::Recovered> RecordLog::Recover() const {
  Recovered r;
  if (std::filesystem::exists(snapshot_path_)) {
    std::ifstream in(snapshot_path_);
    nlohmann::json snap = nlohmann::json::parse(in, nullptr, false);
    if (snap.is_discarded() || !snap.contains("seq") ||
        !snap.contains("state")) {
      return absl::DataLossError(
          absl::StrCat("corrupt snapshot ", snapshot_path_.string()));
    }
    r.snapshot_seq = snap["seq"].get<uint64_t>();
    r.snapshot_state = std::move(snap["state"]);
  }

  absl::StatusOr<std::vector<std::string>> lines = ReadLines(events_path_);
  if (!lines.ok()) return lines.status();
  uint64_t prev = 0;
  for (size_t i = 0; i < lines->size(); ++i) {
    const std::string& line = (*lines)[i];
    if (line.empty()) continue;
    nlohmann::json event = nlohmann::json::parse(line, nullptr, false);
    const bool well_formed = !event.is_discarded() && event.is_object() &&
                             event.contains("seq") &&
                             event["seq"].is_number_unsigned();
    if (!well_formed) {
      if (i + 1 == lines->size()) break;
      return absl::DataLossError(absl::StrCat(
          "corrupt record at line ", i + 1, " of ", events_path_.string()));
    }
    const uint64_t seq = event["seq"].get<uint64_t>();
    if (seq <= prev) {
      return absl::DataLossError(
          absl::StrCat("non-increasing seq ", seq, " at line ", i + 1));
    }
    prev = seq;
    if (seq > r.snapshot_seq) r.events.push_back(std::move(event));
  }
  if (prev < r.snapshot_seq) {
    return absl::DataLossError("snapshot is ahead of the event log");
  }
  return r;
}

absl::StatusOr<uint64_t> RecordLog::Append(nlohmann::json event) {
  std::lock_guard<std::mutex> lock(mu_);
  const uint64_t seq = last_seq_ + 1;
  event["seq"] = seq;
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) {
    return absl::UnavailableError(
        absl::StrCat("write to ", events_path_.string(), " failed"));
  }
  last_seq_ = seq;
  return seq;
}

absl::Status RecordLog::WriteSnapshot(uint64_t seq,
                                      const nlohmann::json& state) {
  std::filesystem::path tmp = snapshot_path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << nlohmann::json{{"seq", seq}, {"state", state}}.dump();
    out.flush();
    if (!out) {
      return absl::UnavailableError(
          absl::StrCat("write to ", tmp.string(), " failed"));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, snapshot_path_, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot replace snapshot: ", ec.message()));
  }
  return absl::OkStatus();
}

uint64_t RecordLog::last_seq() const {
  std::lock_guard<std::mutex> lock(mu_);
  return last_seq_;
}

}  // namespace dpconsent
