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

#include "dpconsent/service.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/time/clock.h"
#include "dpconsent/storyboard.h"

namespace dpconsent {
namespace {

// Laplace tails beyond 50 scale units have probability e^-50; anything
// further out did not come from the mechanism.
constexpr double kPlausibleScales = 50.0;

absl::Status StateError(absl::string_view action, const SessionRecord& r) {
  return absl::FailedPreconditionError(
      absl::StrCat("state-transition error: cannot ", action,
                   " in state ", SessionStateName(r.state)));
}

std::string ExpectedMechanism(ScenarioKind scenario) {
  return std::string(scenario == ScenarioKind::kSalaryNumeric
                         ? kLaplaceMechanismId
                         : kRandomizedResponseId);
}

// Constant time in the length of the expected token.
bool TokenEquals(absl::string_view given, absl::string_view expected) {
  unsigned char diff = given.size() == expected.size() ? 0 : 1;
  for (size_t i = 0; i < expected.size(); ++i) {
    const unsigned char g = i < given.size() ? given[i] : 0;
    diff |= g ^ static_cast<unsigned char>(expected[i]);
  }
  return diff == 0;
}

template <typename T>
absl::StatusOr<T> Field(const nlohmann::json& event, const char* key) {
  if (!event.contains(key)) {
    return absl::DataLossError(
        absl::StrCat("event ", event.value("type", "?"), " lacks '", key,
                     "'"));
  }
  try {
    return event[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    return absl::DataLossError(
        absl::StrCat("event field '", key, "': ", e.what()));
  }
}

}  // namespace

nlohmann::json ProtectedQueryResultJson(const ProtectedQueryResult& r) {
  nlohmann::json j = CentralAnswerJson(r.answer);
  j["records"] = r.records;
  j["remaining_budget"] = r.remaining_budget;
  return j;
}

PipelineService::PipelineService(ServiceConfig config,
                                 const DesignRegistry* registry,
                                 const TemplateStore* templates,
                                 IllustrationEngine engine,
                                 ServiceOptions options, BudgetLedger ledger)
    : config_(std::move(config)),
      registry_(registry),
      templates_(templates),
      engine_(std::move(engine)),
      options_(std::move(options)),
      salary_(engine_.scenario(ScenarioKind::kSalaryNumeric)),
      location_(engine_.scenario(ScenarioKind::kLocationGeo)),
      ledger_(std::move(ledger)),
      rng_(Rng::FromOptionalSeed(config_.seed)) {}

absl::StatusOr<std::unique_ptr<PipelineService>> PipelineService::Create(
    ServiceConfig config, const DesignRegistry* registry,
    const TemplateStore* templates, ServiceOptions options) {
  if (registry == nullptr || templates == nullptr) {
    return absl::InvalidArgumentError(
        "service needs a design registry and a template store");
  }
  absl::StatusOr<IllustrationEngine> engine =
      IllustrationEngine::Create(config, templates);
  if (!engine.ok()) return engine.status();
  absl::StatusOr<BudgetLedger> ledger =
      BudgetLedger::Create(config.total_budget);
  if (!ledger.ok()) return ledger.status();
  // Shipping templates that break the stage or inference rules would make
  // the notification contradict the mechanism.
  for (ScenarioKind s : kAllScenarios) {
    for (DpLevel level : {DpLevel::kLocal, DpLevel::kCentral}) {
      absl::StatusOr<std::shared_ptr<const TextTemplate>> t =
          templates->Get(s, level);
      if (!t.ok()) return t.status();
      TemplateValidation v = ValidateTemplate(**t);
      if (!v.valid()) {
        return absl::FailedPreconditionError(
            absl::StrCat("template ", ScenarioName(s), "/", DpLevelName(level),
                         " is invalid: ", v.violations.front().message));
      }
    }
  }

  std::unique_ptr<PipelineService> service(
      new PipelineService(std::move(config), registry, templates,
                          std::move(*engine), std::move(options),
                          std::move(*ledger)));
  if (!service->config_.storage_path.empty()) {
    absl::StatusOr<std::unique_ptr<RecordLog>> log =
        RecordLog::Open(service->config_.storage_path);
    if (!log.ok()) return log.status();
    service->log_ = std::move(*log);
    if (absl::Status s = service->Recover(); !s.ok()) return s;
  }
  return service;
}

absl::Status PipelineService::Recover() {
  absl::StatusOr<RecordLog::Recovered> rec = log_->Recover();
  if (!rec.ok()) return rec.status();
  if (rec->snapshot_state.has_value()) {
    if (absl::Status s = LoadSnapshot(*rec->snapshot_state); !s.ok()) return s;
  }
  for (const nlohmann::json& event : rec->events) {
    if (absl::Status s = ApplyEvent(event); !s.ok()) {
      return absl::DataLossError(absl::StrCat(
          "replay of event ", event.value("seq", uint64_t{0}), " failed: ",
          s.message()));
    }
  }
  events_since_snapshot_ = rec->events.size();
  return absl::OkStatus();
}

absl::Time PipelineService::Now() const {
  return options_.clock ? options_.clock() : absl::Now();
}

uint64_t PipelineService::NextSeed() {
  std::lock_guard<std::mutex> lock(rng_mu_);
  return rng_.NextU64() >> 11;
}

std::string PipelineService::FreshId(absl::string_view prefix) {
  std::lock_guard<std::mutex> lock(rng_mu_);
  return absl::StrFormat("%s-%016x", prefix, rng_.NextU64());
}

PipelineService::Entry* PipelineService::Find(absl::string_view id) const {
  std::shared_lock<std::shared_mutex> lock(sessions_mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

absl::StatusOr<PipelineService::Entry*> PipelineService::FindOrError(
    absl::string_view id) const {
  Entry* e = Find(id);
  if (e == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown session '", id, "'"));
  }
  return e;
}

size_t PipelineService::session_count() const {
  std::shared_lock<std::shared_mutex> lock(sessions_mu_);
  return sessions_.size();
}

double PipelineService::remaining_budget() const {
  return ledger_.remaining();
}

absl::Status PipelineService::Commit(nlohmann::json event) {
  std::lock_guard<std::mutex> lock(commit_mu_);
  return CommitLocked(std::move(event));
}

absl::Status PipelineService::CommitLocked(nlohmann::json event) {
  if (log_ != nullptr) {
    absl::StatusOr<uint64_t> seq = log_->Append(event);
    if (!seq.ok()) return seq.status();
    event["seq"] = *seq;
  }
  if (absl::Status s = ApplyEvent(event); !s.ok()) {
    // Validation happened before the append; this is a programming error.
    return absl::InternalError(
        absl::StrCat("committed event failed to apply: ", s.message()));
  }
  if (log_ != nullptr && ++events_since_snapshot_ >=
                             static_cast<uint64_t>(config_.snapshot_every)) {
    if (absl::Status s = log_->WriteSnapshot(event["seq"].get<uint64_t>(),
                                             SnapshotState());
        !s.ok()) {
      return s;
    }
    events_since_snapshot_ = 0;
  }
  return absl::OkStatus();
}

absl::Status PipelineService::ApplyEvent(const nlohmann::json& event) {
  absl::StatusOr<std::string> type = Field<std::string>(event, "type");
  if (!type.ok()) return type.status();
  absl::StatusOr<std::string> at_text = Field<std::string>(event, "at");
  if (!at_text.ok()) return at_text.status();
  absl::StatusOr<absl::Time> at = ParseTimestamp(*at_text);
  if (!at.ok()) return at.status();

  if (*type == "query") {
    absl::StatusOr<std::string> qid = Field<std::string>(event, "query_id");
    absl::StatusOr<double> eps = Field<double>(event, "epsilon");
    if (!qid.ok()) return qid.status();
    if (!eps.ok()) return eps.status();
    ++query_counter_;
    return ledger_.TryDebit(*qid, *eps);
  }

  absl::StatusOr<std::string> sid = Field<std::string>(event, "session_id");
  if (!sid.ok()) return sid.status();

  if (*type == "session_created") {
    absl::StatusOr<std::string> scenario_name =
        Field<std::string>(event, "scenario");
    if (!scenario_name.ok()) return scenario_name.status();
    absl::StatusOr<ScenarioKind> scenario = ParseScenario(*scenario_name);
    if (!scenario.ok()) return scenario.status();
    auto entry = std::make_unique<Entry>();
    entry->record.session_id = *sid;
    entry->record.scenario = *scenario;
    entry->record.timestamps["created"] = *at;
    std::unique_lock<std::shared_mutex> lock(sessions_mu_);
    if (!sessions_.emplace(*sid, std::move(entry)).second) {
      return absl::AlreadyExistsError(
          absl::StrCat("duplicate session '", *sid, "'"));
    }
    return absl::OkStatus();
  }

  Entry* e = Find(*sid);
  if (e == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown session '", *sid, "'"));
  }
  SessionRecord& r = e->record;

  if (*type == "concerns_submitted") {
    absl::StatusOr<std::vector<int>> ids =
        Field<std::vector<int>>(event, "selection");
    absl::StatusOr<std::string> level_name =
        Field<std::string>(event, "dp_level");
    if (!ids.ok()) return ids.status();
    if (!level_name.ok()) return level_name.status();
    absl::StatusOr<ConcernSet> sel = ConcernSet::FromIds(*ids);
    if (!sel.ok()) return sel.status();
    absl::StatusOr<DpLevel> level = ParseDpLevel(*level_name);
    if (!level.ok()) return level.status();
    if (*level != MatchDpLevel(*sel)) {
      return absl::DataLossError("recorded dp_level disagrees with selection");
    }
    r.selection = *sel;
    r.dp_level = *level;
    r.state = SessionState::kConcernsSubmitted;
    r.timestamps["concerns_submitted"] = *at;
  } else if (*type == "notified") {
    absl::StatusOr<std::string> nid =
        Field<std::string>(event, "notification_id");
    if (!nid.ok()) return nid.status();
    if (!event.contains("bundle") || !event["bundle"].is_object()) {
      return absl::DataLossError("notified event lacks a bundle");
    }
    r.notification_id = *nid;
    e->bundle = event["bundle"].dump();
    r.state = SessionState::kNotified;
    r.timestamps["notified"] = *at;
  } else if (*type == "consent") {
    absl::StatusOr<std::string> d = Field<std::string>(event, "decision");
    if (!d.ok()) return d.status();
    absl::StatusOr<ConsentDecision> decision = ParseConsentDecision(*d);
    if (!decision.ok()) return decision.status();
    r.consent = *decision;
    if (*decision == ConsentDecision::kGranted) {
      r.state = SessionState::kConsented;
      r.timestamps["consented"] = *at;
    } else {
      r.state = SessionState::kDeclined;
      r.timestamps["declined"] = *at;
    }
  } else if (*type == "data_submitted") {
    absl::StatusOr<std::string> tag = Field<std::string>(event, "tag");
    if (!tag.ok()) return tag.status();
    if (!event.contains("value")) return absl::DataLossError("no value");
    absl::StatusOr<DataValue> value = DataValueFromJson(event["value"]);
    if (!value.ok()) return value.status();
    StoredData d;
    if (*tag == "raw") {
      d.in_protected_store = true;
      std::lock_guard<std::mutex> lock(protected_mu_);
      protected_[r.scenario].push_back({r.session_id, *value});
    } else {
      absl::StatusOr<std::string> mech =
          Field<std::string>(event, "mechanism_id");
      if (!mech.ok()) return mech.status();
      d.perturbed_value = *value;
      d.mechanism_id = *mech;
    }
    r.submitted_data = std::move(d);
    r.timestamps["data_submitted"] = *at;
  } else if (*type == "rating") {
    absl::StatusOr<std::string> item_name = Field<std::string>(event, "item");
    absl::StatusOr<int> score = Field<int>(event, "score");
    absl::StatusOr<std::string> design = Field<std::string>(event, "design_id");
    if (!item_name.ok()) return item_name.status();
    if (!score.ok()) return score.status();
    if (!design.ok()) return design.status();
    absl::StatusOr<LikertItem> item = ParseLikertItem(*item_name);
    if (!item.ok()) return item.status();
    r.ratings.push_back({*item, *score, *design, *at});
  } else {
    return absl::DataLossError(absl::StrCat("unknown event type '", *type, "'"));
  }
  return absl::OkStatus();
}

nlohmann::json PipelineService::SnapshotState() const {
  nlohmann::json sessions = nlohmann::json::array();
  {
    std::shared_lock<std::shared_mutex> lock(sessions_mu_);
    for (const auto& [id, entry] : sessions_) {
      nlohmann::json s = {{"record", SessionRecordJson(entry->record)}};
      s["bundle"] = entry->bundle.empty()
                        ? nlohmann::json()
                        : nlohmann::json::parse(entry->bundle);
      sessions.push_back(std::move(s));
    }
  }
  nlohmann::json raw = nlohmann::json::array();
  {
    std::lock_guard<std::mutex> lock(protected_mu_);
    for (const auto& [scenario, values] : protected_) {
      for (const ProtectedValue& v : values) {
        raw.push_back({{"scenario", ScenarioName(scenario)},
                       {"session_id", v.session_id},
                       {"value", DataValueJson(v.value)}});
      }
    }
  }
  nlohmann::json ledger = nlohmann::json::array();
  for (const BudgetLedger::Entry& entry : ledger_.entries()) {
    ledger.push_back(
        {{"query_id", entry.query_id}, {"epsilon", entry.epsilon}});
  }
  return {{"sessions", sessions},
          {"protected", raw},
          {"ledger", ledger},
          {"query_counter", query_counter_}};
}

absl::Status PipelineService::LoadSnapshot(const nlohmann::json& state) {
  try {
    for (const nlohmann::json& s : state.at("sessions")) {
      absl::StatusOr<SessionRecord> r = SessionRecordFromJson(s.at("record"));
      if (!r.ok()) return r.status();
      if (r->selection && r->dp_level != MatchDpLevel(*r->selection)) {
        return absl::DataLossError(
            "snapshot dp_level disagrees with selection");
      }
      auto entry = std::make_unique<Entry>();
      entry->record = std::move(*r);
      if (!s.at("bundle").is_null()) entry->bundle = s["bundle"].dump();
      std::string id = entry->record.session_id;
      sessions_.emplace(std::move(id), std::move(entry));
    }
    for (const nlohmann::json& v : state.at("protected")) {
      absl::StatusOr<ScenarioKind> scenario =
          ParseScenario(v.at("scenario").get<std::string>());
      if (!scenario.ok()) return scenario.status();
      absl::StatusOr<DataValue> value = DataValueFromJson(v.at("value"));
      if (!value.ok()) return value.status();
      protected_[*scenario].push_back(
          {v.at("session_id").get<std::string>(), *value});
    }
    for (const nlohmann::json& entry : state.at("ledger")) {
      if (absl::Status s = ledger_.TryDebit(
              entry.at("query_id").get<std::string>(),
              entry.at("epsilon").get<double>());
          !s.ok()) {
        return s;
      }
    }
    query_counter_ = state.at("query_counter").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    return absl::DataLossError(absl::StrCat("corrupt snapshot: ", e.what()));
  }
  return absl::OkStatus();
}

absl::StatusOr<SessionRecord> PipelineService::CreateSession(
    ScenarioKind scenario) {
  std::string id;
  do {
    id = FreshId("s");
  } while (Find(id) != nullptr);
  nlohmann::json event = {{"type", "session_created"},
                          {"session_id", id},
                          {"scenario", ScenarioName(scenario)},
                          {"at", FormatTimestamp(Now())}};
  if (absl::Status s = Commit(std::move(event)); !s.ok()) return s;
  return GetSession(id);
}

absl::StatusOr<SessionRecord> PipelineService::CreateSession(
    absl::string_view scenario) {
  absl::StatusOr<ScenarioKind> kind = ParseScenario(scenario);
  if (!kind.ok()) return kind.status();
  return CreateSession(*kind);
}

absl::StatusOr<SessionRecord> PipelineService::GetSession(
    absl::string_view id) const {
  absl::StatusOr<Entry*> e = FindOrError(id);
  if (!e.ok()) return e.status();
  std::lock_guard<std::mutex> lock((*e)->mu);
  return (*e)->record;
}

absl::StatusOr<SessionRecord> PipelineService::SubmitConcerns(
    absl::string_view id, std::span<const int> selection) {
  absl::StatusOr<Entry*> e = FindOrError(id);
  if (!e.ok()) return e.status();
  std::lock_guard<std::mutex> lock((*e)->mu);
  const SessionRecord& r = (*e)->record;
  if (r.state != SessionState::kCreated) {
    return StateError("submit concerns", r);
  }
  absl::StatusOr<ConcernSet> sel = ConcernSet::FromIds(selection);
  if (!sel.ok()) return sel.status();
  nlohmann::json event = {{"type", "concerns_submitted"},
                          {"session_id", r.session_id},
                          {"selection", sel->int_ids()},
                          {"dp_level", DpLevelName(MatchDpLevel(*sel))},
                          {"at", FormatTimestamp(Now())}};
  if (absl::Status s = Commit(std::move(event)); !s.ok()) return s;
  return r;
}

absl::StatusOr<nlohmann::json> PipelineService::AssembleBundle(
    const SessionRecord& r) {
  const DpLevel level = *r.dp_level;
  std::vector<DesignDescriptor> cell = registry_->ForCell(r.scenario, level);
  const DesignDescriptor* text = nullptr;
  const DesignDescriptor* storyboard = nullptr;
  std::vector<const DesignDescriptor*> extras;
  for (const DesignDescriptor& d : cell) {
    if (d.category == DesignCategory::kText && text == nullptr) {
      text = &d;
    } else if (d.category == DesignCategory::kStoryboard &&
               storyboard == nullptr) {
      storyboard = &d;
    } else {
      extras.push_back(&d);
    }
  }

  absl::StatusOr<TextBlock> block =
      templates_->Render(r.scenario, level, *r.selection);
  if (!block.ok()) return block.status();
  nlohmann::json text_json = TextBlockJson(*block);
  text_json["type"] = "text";
  text_json["schema_version"] = 1;

  nlohmann::json illustrations = nlohmann::json::array();
  for (const DesignDescriptor* d : extras) {
    PayloadRequest req;
    req.seed = NextSeed();
    absl::StatusOr<nlohmann::json> env = engine_.Generate(*d, req);
    if (!env.ok()) return env.status();
    illustrations.push_back(std::move(*env));
  }

  nlohmann::json bundle = {
      {"type", "notification"},
      {"schema_version", 1},
      {"session_id", r.session_id},
      {"scenario", ScenarioName(r.scenario)},
      {"dp_level", DpLevelName(level)},
      {"selection", r.selection->int_ids()},
      {"text", std::move(text_json)},
      {"storyboard", StoryboardJson(BuildStoryboard(r.scenario, level))},
      {"illustrations", std::move(illustrations)}};
  bundle["text_design_id"] =
      text ? nlohmann::json(text->design_id) : nlohmann::json();
  bundle["storyboard_design_id"] =
      storyboard ? nlohmann::json(storyboard->design_id) : nlohmann::json();
  return bundle;
}

absl::StatusOr<std::string> PipelineService::GetNotification(
    absl::string_view id) {
  absl::StatusOr<Entry*> e = FindOrError(id);
  if (!e.ok()) return e.status();
  std::lock_guard<std::mutex> lock((*e)->mu);
  const SessionRecord& r = (*e)->record;
  if (r.state == SessionState::kCreated) {
    return StateError("fetch the notification", r);
  }
  if (r.state != SessionState::kConcernsSubmitted) return (*e)->bundle;

  absl::StatusOr<nlohmann::json> bundle = AssembleBundle(r);
  if (!bundle.ok()) return bundle.status();
  const std::string nid = FreshId("n");
  (*bundle)["notification_id"] = nid;
  nlohmann::json event = {{"type", "notified"},
                          {"session_id", r.session_id},
                          {"notification_id", nid},
                          {"bundle", std::move(*bundle)},
                          {"at", FormatTimestamp(Now())}};
  if (absl::Status s = Commit(std::move(event)); !s.ok()) return s;
  return (*e)->bundle;
}

absl::StatusOr<SessionRecord> PipelineService::SubmitConsent(
    absl::string_view id, ConsentDecision decision) {
  absl::StatusOr<Entry*> e = FindOrError(id);
  if (!e.ok()) return e.status();
  std::lock_guard<std::mutex> lock((*e)->mu);
  const SessionRecord& r = (*e)->record;
  if (decision == ConsentDecision::kPending) {
    return absl::InvalidArgumentError(
        "consent decision must be granted or declined");
  }
  if (r.state != SessionState::kNotified) return StateError("consent", r);
  nlohmann::json event = {{"type", "consent"},
                          {"session_id", r.session_id},
                          {"decision", ConsentDecisionName(decision)},
                          {"at", FormatTimestamp(Now())}};
  if (absl::Status s = Commit(std::move(event)); !s.ok()) return s;
  return r;
}

absl::Status PipelineService::CheckPlausible(
    const SessionRecord& r, const DataSubmission& data) const {
  const Scenario& sc =
      r.scenario == ScenarioKind::kSalaryNumeric ? salary_ : location_;
  if (sc.kind() == ScenarioKind::kLocationGeo) {
    const std::string* cell = std::get_if<std::string>(&data.value);
    if (cell == nullptr || !sc.grid().IndexOf(*cell).has_value()) {
      return absl::InvalidArgumentError(
          "validation error: value is not a known cell");
    }
    return absl::OkStatus();
  }
  const double* x = std::get_if<double>(&data.value);
  if (x == nullptr || !std::isfinite(*x)) {
    return absl::InvalidArgumentError(
        "validation error: value must be a finite number");
  }
  const NumericDomain& d = sc.numeric();
  if (*r.dp_level == DpLevel::kCentral) {
    if (!d.Contains(*x)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "validation error: ", *x, " outside [", d.lo(), ", ", d.hi(), "]"));
    }
    return absl::OkStatus();
  }
  const double slack = kPlausibleScales * d.width() / config_.local_epsilon;
  if (*x < d.lo() - slack || *x > d.hi() + slack) {
    return absl::InvalidArgumentError(absl::StrCat(
        "validation error: ", *x, " is not a plausible perturbed value"));
  }
  return absl::OkStatus();
}

absl::StatusOr<SessionRecord> PipelineService::SubmitData(
    absl::string_view id, const DataSubmission& data) {
  absl::StatusOr<Entry*> e = FindOrError(id);
  if (!e.ok()) return e.status();
  std::lock_guard<std::mutex> lock((*e)->mu);
  const SessionRecord& r = (*e)->record;
  if (r.state == SessionState::kDeclined) {
    return absl::FailedPreconditionError(
        "state-transition error: consent was declined, no data accepted");
  }
  if (r.state != SessionState::kConsented) return StateError("submit data", r);
  if (r.submitted_data.has_value()) {
    return absl::FailedPreconditionError(
        "state-transition error: data already submitted");
  }

  const std::string expected = ExpectedMechanism(r.scenario);
  nlohmann::json event = {{"type", "data_submitted"},
                          {"session_id", r.session_id},
                          {"at", FormatTimestamp(Now())}};
  if (*r.dp_level == DpLevel::kLocal) {
    if (!data.perturbed) {
      return absl::PermissionDeniedError(
          "local-dp-violation: LocalDP sessions accept only values perturbed "
          "on the device");
    }
    if (!data.mechanism_id.empty() && data.mechanism_id != expected) {
      return absl::InvalidArgumentError(
          absl::StrCat("validation error: expected mechanism '", expected,
                       "', got '", data.mechanism_id, "'"));
    }
    if (absl::Status s = CheckPlausible(r, data); !s.ok()) return s;
    event["tag"] = "perturbed";
    event["mechanism_id"] = expected;
  } else {
    if (data.perturbed) {
      return absl::InvalidArgumentError(
          "validation error: CentralDP sessions take the raw value; noise is "
          "added when answering queries");
    }
    if (absl::Status s = CheckPlausible(r, data); !s.ok()) return s;
    event["tag"] = "raw";
    event["store"] = "protected";
  }
  event["value"] = DataValueJson(data.value);
  if (absl::Status s = Commit(std::move(event)); !s.ok()) return s;
  return r;
}

absl::StatusOr<SessionRecord> PipelineService::SubmitRating(
    absl::string_view id, LikertItem item, int score,
    absl::string_view design_id) {
  absl::StatusOr<Entry*> e = FindOrError(id);
  if (!e.ok()) return e.status();
  std::lock_guard<std::mutex> lock((*e)->mu);
  const SessionRecord& r = (*e)->record;
  if (r.state == SessionState::kCreated ||
      r.state == SessionState::kConcernsSubmitted) {
    return StateError("rate a design", r);
  }
  if (absl::Status s = ValidateLikertScore(score); !s.ok()) return s;
  if (registry_->Find(design_id) == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown design '", design_id, "'"));
  }
  nlohmann::json event = {{"type", "rating"},
                          {"session_id", r.session_id},
                          {"item", LikertItemName(item)},
                          {"score", score},
                          {"design_id", design_id},
                          {"at", FormatTimestamp(Now())}};
  if (absl::Status s = Commit(std::move(event)); !s.ok()) return s;
  return r;
}

absl::Status PipelineService::CheckToken(absl::string_view token) const {
  if (config_.operator_token.empty()) {
    return absl::UnauthenticatedError(
        "operator access disabled: no operator token configured");
  }
  if (!TokenEquals(token, config_.operator_token)) {
    return absl::UnauthenticatedError("bad operator token");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<nlohmann::json>> PipelineService::ExportRecords(
    const ExportFilter& filter, absl::string_view token,
    bool include_protected) const {
  if (absl::Status s = CheckToken(token); !s.ok()) return s;
  std::vector<Entry*> entries;
  {
    std::shared_lock<std::shared_mutex> lock(sessions_mu_);
    for (const auto& [id, entry] : sessions_) entries.push_back(entry.get());
  }
  std::vector<nlohmann::json> out;
  for (Entry* entry : entries) {
    SessionRecord r;
    {
      std::lock_guard<std::mutex> lock(entry->mu);
      r = entry->record;
    }
    if (filter.scenario && r.scenario != *filter.scenario) continue;
    if (filter.dp_level && r.dp_level != filter.dp_level) continue;
    if (filter.state && r.state != *filter.state) continue;
    nlohmann::json j = SessionRecordJson(r);
    if (include_protected && r.submitted_data &&
        r.submitted_data->in_protected_store) {
      std::lock_guard<std::mutex> lock(protected_mu_);
      auto it = protected_.find(r.scenario);
      if (it != protected_.end()) {
        for (const ProtectedValue& v : it->second) {
          if (v.session_id == r.session_id) {
            j["protected_value"] = DataValueJson(v.value);
          }
        }
      }
    }
    out.push_back(std::move(j));
  }
  return out;
}

absl::StatusOr<ProtectedQueryResult> PipelineService::AnswerQuery(
    const ProtectedQuery& q, absl::string_view token) {
  if (absl::Status s = CheckToken(token); !s.ok()) return s;
  const Scenario& sc =
      q.scenario == ScenarioKind::kSalaryNumeric ? salary_ : location_;
  absl::StatusOr<MechanismParams> params = MechanismParams::Create(
      q.epsilon.value_or(config_.central_epsilon), 1.0, sc.domain());
  if (!params.ok()) return params.status();

  std::lock_guard<std::mutex> lock(commit_mu_);
  std::vector<DataValue> dataset;
  {
    std::lock_guard<std::mutex> plock(protected_mu_);
    auto it = protected_.find(q.scenario);
    if (it != protected_.end()) {
      for (const ProtectedValue& v : it->second) dataset.push_back(v.value);
    }
  }
  CentralQueryOptions options;
  options.query_id = q.query_id.empty()
                         ? absl::StrCat("q-", query_counter_ + 1)
                         : q.query_id;
  options.numeric_bins = config_.histogram_bins;

  // Answer against a scratch copy; the real ledger moves only when the
  // debit is durable.
  BudgetLedger scratch = ledger_;
  absl::StatusOr<CentralAnswer> answer;
  {
    std::lock_guard<std::mutex> rlock(rng_mu_);
    answer = CentralAnswerQuery(dataset, q.kind, *params, scratch, rng_,
                                options);
  }
  if (!answer.ok()) return answer.status();
  // The noise seed would let anyone subtract the noise.
  answer->seed.reset();

  nlohmann::json event = {{"type", "query"},
                          {"query_id", options.query_id},
                          {"scenario", ScenarioName(q.scenario)},
                          {"kind", QueryKindName(q.kind)},
                          {"epsilon", params->epsilon()},
                          {"at", FormatTimestamp(Now())}};
  if (absl::Status s = CommitLocked(std::move(event)); !s.ok()) return s;
  return ProtectedQueryResult{*std::move(answer),
                              static_cast<int64_t>(dataset.size()),
                              ledger_.remaining()};
}

nlohmann::json PipelineService::ClientMechanismJson() const {
  const NumericDomain& d = salary_.numeric();
  return {{"type", "client_mechanisms"},
          {"schema_version", 1},
          {"SalaryNumeric",
           {{"mechanism_id", kLaplaceMechanismId},
            {"epsilon", config_.local_epsilon},
            {"sensitivity", d.width()},
            {"scale", d.width() / config_.local_epsilon},
            {"domain", DomainJson(salary_.domain())}}},
          {"LocationGeo",
           {{"mechanism_id", kRandomizedResponseId},
            {"epsilon", config_.local_epsilon},
            {"domain", DomainJson(location_.domain())}}}};
}

}  // namespace dpconsent
