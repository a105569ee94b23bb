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

#include "dpconsent/session.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {
namespace {

constexpr absl::string_view kTimeFormat = "%Y-%m-%d%ET%H:%M:%E3SZ";

template <typename Enum, size_t N>
absl::StatusOr<Enum> ParseByName(absl::string_view name,
                                 const Enum (&values)[N],
                                 absl::string_view (*to_name)(Enum),
                                 absl::string_view what) {
  for (Enum v : values) {
    if (to_name(v) == name) return v;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown ", what, " '", name, "'"));
}

constexpr SessionState kStates[] = {
    SessionState::kCreated, SessionState::kConcernsSubmitted,
    SessionState::kNotified, SessionState::kConsented, SessionState::kDeclined};
constexpr ConsentDecision kDecisions[] = {ConsentDecision::kPending,
                                          ConsentDecision::kGranted,
                                          ConsentDecision::kDeclined};
constexpr LikertItem kItems[] = {LikertItem::kClarity,
                                 LikertItem::kPersuasiveness};

}  // namespace

absl::string_view SessionStateName(SessionState s) {
  switch (s) {
    case SessionState::kCreated:
      return "created";
    case SessionState::kConcernsSubmitted:
      return "concerns_submitted";
    case SessionState::kNotified:
      return "notified";
    case SessionState::kConsented:
      return "consented";
    case SessionState::kDeclined:
      return "declined";
  }
  return "unknown";
}

absl::StatusOr<SessionState> ParseSessionState(absl::string_view name) {
  return ParseByName(name, kStates, &SessionStateName, "session state");
}

absl::string_view ConsentDecisionName(ConsentDecision c) {
  switch (c) {
    case ConsentDecision::kPending:
      return "pending";
    case ConsentDecision::kGranted:
      return "granted";
    case ConsentDecision::kDeclined:
      return "declined";
  }
  return "unknown";
}

absl::StatusOr<ConsentDecision> ParseConsentDecision(absl::string_view name) {
  return ParseByName(name, kDecisions, &ConsentDecisionName,
                     "consent decision");
}

absl::string_view LikertItemName(LikertItem item) {
  return item == LikertItem::kClarity ? "clarity" : "persuasiveness";
}

absl::StatusOr<LikertItem> ParseLikertItem(absl::string_view name) {
  return ParseByName(name, kItems, &LikertItemName, "rating item");
}

absl::string_view LikertQuestion(LikertItem item) {
  if (item == LikertItem::kClarity) {
    return "This design clearly describes the differential privacy "
           "mechanism.";
  }
  return "This design resolves my concern(s) so I feel comfortable to share "
         "my data.";
}

absl::Status ValidateLikertScore(int score) {
  if (score < 1 || score > 5) {
    return absl::InvalidArgumentError(
        absl::StrCat("rating score must be in 1..5, got ", score));
  }
  return absl::OkStatus();
}

absl::StatusOr<DataSubmission> DataSubmissionFromJson(
    const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("value")) {
    return absl::InvalidArgumentError(
        "malformed input: data submission needs a 'value'");
  }
  absl::StatusOr<DataValue> value = DataValueFromJson(j["value"]);
  if (!value.ok()) return value.status();
  DataSubmission s;
  s.value = std::move(*value);
  if (j.contains("perturbed")) {
    if (!j["perturbed"].is_boolean()) {
      return absl::InvalidArgumentError(
          "malformed input: 'perturbed' must be a boolean");
    }
    s.perturbed = j["perturbed"].get<bool>();
  }
  if (j.contains("mechanism_id")) {
    if (!j["mechanism_id"].is_string()) {
      return absl::InvalidArgumentError(
          "malformed input: 'mechanism_id' must be a string");
    }
    s.mechanism_id = j["mechanism_id"].get<std::string>();
  }
  return s;
}

nlohmann::json DataSubmissionJson(const DataSubmission& s) {
  nlohmann::json j = {{"value", DataValueJson(s.value)},
                      {"perturbed", s.perturbed}};
  if (!s.mechanism_id.empty()) j["mechanism_id"] = s.mechanism_id;
  return j;
}

std::string FormatTimestamp(absl::Time t) {
  return absl::FormatTime(kTimeFormat, t, absl::UTCTimeZone());
}

absl::StatusOr<absl::Time> ParseTimestamp(absl::string_view s) {
  absl::Time t;
  std::string err;
  if (!absl::ParseTime(kTimeFormat, s, absl::UTCTimeZone(), &t, &err)) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad timestamp '", s, "': ", err));
  }
  return t;
}

nlohmann::json SessionRecordJson(const SessionRecord& r) {
  nlohmann::json j;
  j["session_id"] = r.session_id;
  j["scenario"] = ScenarioName(r.scenario);
  j["state"] = SessionStateName(r.state);
  j["selection"] =
      r.selection ? nlohmann::json(r.selection->int_ids()) : nlohmann::json();
  j["dp_level"] =
      r.dp_level ? nlohmann::json(DpLevelName(*r.dp_level)) : nlohmann::json();
  j["notification_id"] = r.notification_id ? nlohmann::json(*r.notification_id)
                                           : nlohmann::json();
  j["consent"] = ConsentDecisionName(r.consent);
  if (!r.submitted_data) {
    j["submitted_data"] = nullptr;
  } else if (r.submitted_data->in_protected_store) {
    j["submitted_data"] = {{"tag", "raw"}, {"store", "protected"}};
  } else {
    j["submitted_data"] = {
        {"tag", "perturbed"},
        {"value", DataValueJson(*r.submitted_data->perturbed_value)},
        {"mechanism_id", r.submitted_data->mechanism_id}};
  }
  nlohmann::json ratings = nlohmann::json::array();
  for (const LikertRating& rating : r.ratings) {
    ratings.push_back({{"item", LikertItemName(rating.item)},
                       {"score", rating.score},
                       {"design_id", rating.design_id},
                       {"at", FormatTimestamp(rating.at)}});
  }
  j["ratings"] = std::move(ratings);
  nlohmann::json stamps = nlohmann::json::object();
  for (const auto& [name, t] : r.timestamps) stamps[name] = FormatTimestamp(t);
  j["timestamps"] = std::move(stamps);
  return j;
}

absl::StatusOr<SessionRecord> SessionRecordFromJson(const nlohmann::json& j) {
  try {
    SessionRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    absl::StatusOr<ScenarioKind> scenario =
        ParseScenario(j.at("scenario").get<std::string>());
    if (!scenario.ok()) return scenario.status();
    r.scenario = *scenario;
    absl::StatusOr<SessionState> state =
        ParseSessionState(j.at("state").get<std::string>());
    if (!state.ok()) return state.status();
    r.state = *state;
    if (!j.at("selection").is_null()) {
      absl::StatusOr<ConcernSet> sel =
          ConcernSet::FromIds(j["selection"].get<std::vector<int>>());
      if (!sel.ok()) return sel.status();
      r.selection = *sel;
    }
    if (!j.at("dp_level").is_null()) {
      absl::StatusOr<DpLevel> level =
          ParseDpLevel(j["dp_level"].get<std::string>());
      if (!level.ok()) return level.status();
      r.dp_level = *level;
    }
    if (!j.at("notification_id").is_null()) {
      r.notification_id = j["notification_id"].get<std::string>();
    }
    absl::StatusOr<ConsentDecision> consent =
        ParseConsentDecision(j.at("consent").get<std::string>());
    if (!consent.ok()) return consent.status();
    r.consent = *consent;
    const nlohmann::json& data = j.at("submitted_data");
    if (!data.is_null()) {
      StoredData d;
      d.in_protected_store = data.at("tag").get<std::string>() == "raw";
      if (!d.in_protected_store) {
        absl::StatusOr<DataValue> v = DataValueFromJson(data.at("value"));
        if (!v.ok()) return v.status();
        d.perturbed_value = *v;
        d.mechanism_id = data.at("mechanism_id").get<std::string>();
      }
      r.submitted_data = std::move(d);
    }
    for (const nlohmann::json& rj : j.at("ratings")) {
      absl::StatusOr<LikertItem> item =
          ParseLikertItem(rj.at("item").get<std::string>());
      if (!item.ok()) return item.status();
      absl::StatusOr<absl::Time> at =
          ParseTimestamp(rj.at("at").get<std::string>());
      if (!at.ok()) return at.status();
      r.ratings.push_back({*item, rj.at("score").get<int>(),
                           rj.at("design_id").get<std::string>(), *at});
    }
    for (const auto& [name, value] : j.at("timestamps").items()) {
      absl::StatusOr<absl::Time> t = ParseTimestamp(value.get<std::string>());
      if (!t.ok()) return t.status();
      r.timestamps[name] = *t;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed session record: ", e.what()));
  }
}

}  // namespace dpconsent
