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

#ifndef DPCONSENT_SERVICE_H_
#define DPCONSENT_SERVICE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/time/time.h"
#include "dpconsent/budget_ledger.h"
#include "dpconsent/central_query.h"
#include "dpconsent/config.h"
#include "dpconsent/design_payloads.h"
#include "dpconsent/design_registry.h"
#include "dpconsent/random.h"
#include "dpconsent/record_log.h"
#include "dpconsent/session.h"
#include "dpconsent/text_templates.h"
#include "json.hpp"

namespace dpconsent {

struct ServiceOptions {
  // Defaults to absl::Now.
  std::function<absl::Time()> clock;
};

struct ExportFilter {
  std::optional<ScenarioKind> scenario;
  std::optional<DpLevel> dp_level;
  std::optional<SessionState> state;
};

struct ProtectedQuery {
  ScenarioKind scenario;
  QueryKind kind;
  // Defaults to the configured central epsilon.
  std::optional<double> epsilon;
  // Generated when empty.
  std::string query_id;
};

struct ProtectedQueryResult {
  CentralAnswer answer;
  int64_t records;
  double remaining_budget;
};

nlohmann::json ProtectedQueryResultJson(const ProtectedQueryResult& r);

// The consent pipeline: concerns -> dp level -> notification -> consent ->
// data -> ratings.
//
// Every state change is an event. An operation validates under the
// session's mutex, then commits the event: append to the record log (when
// storage is configured) and apply it to memory, both under one commit
// mutex. Recovery applies the same events through the same code, so a
// restarted service holds byte-identical records and bundles.
//
// Errors: NotFound for unknown sessions, InvalidArgument for validation
// failures, FailedPrecondition for state-transition errors and an exhausted
// budget, PermissionDenied for raw data on a LocalDP session,
// Unauthenticated for a bad operator token.
class PipelineService {
 public:
  static absl::StatusOr<std::unique_ptr<PipelineService>> Create(
      ServiceConfig config, const DesignRegistry* registry,
      const TemplateStore* templates, ServiceOptions options = {});

  PipelineService(const PipelineService&) = delete;
  PipelineService& operator=(const PipelineService&) = delete;

  absl::StatusOr<SessionRecord> CreateSession(ScenarioKind scenario);
  absl::StatusOr<SessionRecord> CreateSession(absl::string_view scenario);
  absl::StatusOr<SessionRecord> GetSession(absl::string_view id) const;

  absl::StatusOr<SessionRecord> SubmitConcerns(absl::string_view id,
                                               std::span<const int> selection);

  // Serialized bundle. Assembled once, on the first call after concerns
  // were submitted; later calls return the same bytes.
  absl::StatusOr<std::string> GetNotification(absl::string_view id);

  absl::StatusOr<SessionRecord> SubmitConsent(absl::string_view id,
                                              ConsentDecision decision);

  absl::StatusOr<SessionRecord> SubmitData(absl::string_view id,
                                           const DataSubmission& data);

  absl::StatusOr<SessionRecord> SubmitRating(absl::string_view id,
                                             LikertItem item, int score,
                                             absl::string_view design_id);

  // Public record views. With include_protected, CentralDP sessions also
  // carry "protected_value"; LocalDP sessions never hold a raw value.
  absl::StatusOr<std::vector<nlohmann::json>> ExportRecords(
      const ExportFilter& filter, absl::string_view token,
      bool include_protected) const;

  // The only read path for CentralDP raw values: a noisy aggregate over
  // every stored record of the scenario, debited from the store's budget.
  absl::StatusOr<ProtectedQueryResult> AnswerQuery(const ProtectedQuery& q,
                                                   absl::string_view token);

  // Parameters a client needs to run the local mechanism itself.
  nlohmann::json ClientMechanismJson() const;

  uint64_t NextSeed();

  const ServiceConfig& config() const { return config_; }
  const DesignRegistry& registry() const { return *registry_; }
  const IllustrationEngine& engine() const { return engine_; }
  double remaining_budget() const;
  size_t session_count() const;
  // Null for in-memory services.
  const RecordLog* log() const { return log_.get(); }

 private:
  struct Entry {
    mutable std::mutex mu;
    SessionRecord record;
    std::string bundle;
  };
  struct ProtectedValue {
    std::string session_id;
    DataValue value;
  };

  PipelineService(ServiceConfig config, const DesignRegistry* registry,
                  const TemplateStore* templates, IllustrationEngine engine,
                  ServiceOptions options, BudgetLedger ledger);

  absl::Status Recover();
  absl::Status LoadSnapshot(const nlohmann::json& state);
  nlohmann::json SnapshotState() const;

  // Appends (if persistent) and applies one event under commit_mu_.
  absl::Status Commit(nlohmann::json event);
  absl::Status CommitLocked(nlohmann::json event);
  absl::Status ApplyEvent(const nlohmann::json& event);

  Entry* Find(absl::string_view id) const;
  absl::StatusOr<Entry*> FindOrError(absl::string_view id) const;
  absl::Status CheckToken(absl::string_view token) const;
  absl::StatusOr<nlohmann::json> AssembleBundle(const SessionRecord& r);
  absl::Status CheckPlausible(const SessionRecord& r,
                              const DataSubmission& data) const;
  std::string FreshId(absl::string_view prefix);
  absl::Time Now() const;

  const ServiceConfig config_;
  const DesignRegistry* registry_;
  const TemplateStore* templates_;
  const IllustrationEngine engine_;
  const ServiceOptions options_;
  Scenario salary_;
  Scenario location_;

  std::unique_ptr<RecordLog> log_;

  std::mutex commit_mu_;
  uint64_t events_since_snapshot_ = 0;

  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<Entry>, std::less<>> sessions_;

  mutable std::mutex protected_mu_;
  std::map<ScenarioKind, std::vector<ProtectedValue>> protected_;
  BudgetLedger ledger_;
  uint64_t query_counter_ = 0;

  mutable std::mutex rng_mu_;
  Rng rng_;
};

}  // namespace dpconsent

#endif  // DPCONSENT_SERVICE_H_
