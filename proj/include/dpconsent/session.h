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

#ifndef DPCONSENT_SESSION_H_
#define DPCONSENT_SESSION_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/time/time.h"
#include "dpconsent/concern.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

// created -> concerns_submitted -> notified -> consented | declined.
enum class SessionState {
  kCreated,
  kConcernsSubmitted,
  kNotified,
  kConsented,
  kDeclined,
};

absl::string_view SessionStateName(SessionState s);
absl::StatusOr<SessionState> ParseSessionState(absl::string_view name);

enum class ConsentDecision { kPending, kGranted, kDeclined };

absl::string_view ConsentDecisionName(ConsentDecision c);
absl::StatusOr<ConsentDecision> ParseConsentDecision(absl::string_view name);

enum class LikertItem { kClarity, kPersuasiveness };

absl::string_view LikertItemName(LikertItem item);
absl::StatusOr<LikertItem> ParseLikertItem(absl::string_view name);

// The two study questions, keyed by item.
absl::string_view LikertQuestion(LikertItem item);

struct LikertRating {
  LikertItem item;
  int score;
  std::string design_id;
  absl::Time at;
};

absl::Status ValidateLikertScore(int score);

// What a client posts to the data endpoint. LocalDP clients perturb on the
// device and set `perturbed`; CentralDP clients send the raw value.
struct DataSubmission {
  DataValue value;
  bool perturbed = false;
  std::string mechanism_id;
};

absl::StatusOr<DataSubmission> DataSubmissionFromJson(const nlohmann::json& j);
nlohmann::json DataSubmissionJson(const DataSubmission& s);

// Data held on the session itself. LocalDP sessions keep the perturbed
// value; CentralDP sessions keep only a marker, the raw value lives in the
// protected store.
struct StoredData {
  bool in_protected_store = false;
  std::optional<DataValue> perturbed_value;
  std::string mechanism_id;
};

struct SessionRecord {
  std::string session_id;
  ScenarioKind scenario;
  SessionState state = SessionState::kCreated;
  std::optional<ConcernSet> selection;
  std::optional<DpLevel> dp_level;
  std::optional<std::string> notification_id;
  ConsentDecision consent = ConsentDecision::kPending;
  std::optional<StoredData> submitted_data;
  std::vector<LikertRating> ratings;
  // Keyed by the transition name: created, concerns_submitted, notified,
  // consented, declined, data_submitted.
  std::map<std::string, absl::Time> timestamps;
};

std::string FormatTimestamp(absl::Time t);
absl::StatusOr<absl::Time> ParseTimestamp(absl::string_view s);

// Public view of a record: never contains a raw value.
nlohmann::json SessionRecordJson(const SessionRecord& r);
absl::StatusOr<SessionRecord> SessionRecordFromJson(const nlohmann::json& j);

}  // namespace dpconsent

#endif  // DPCONSENT_SESSION_H_
