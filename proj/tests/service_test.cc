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

#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "dpconsent/local_client.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"
#include "testing/model_check.h"
#include "testing/schema_validator.h"

namespace dpconsent {
namespace {

using ::dpconsent::testing::MakeService;
using ::dpconsent::testing::TestConfig;

constexpr char kToken[] = "test-token";

std::vector<int> Ids(std::initializer_list<int> ids) { return ids; }

void ExpectSchema(const char* schema, const nlohmann::json& j) {
  std::vector<std::string> errors = testing::LoadSchema(schema).Validate(j);
  EXPECT_TRUE(errors.empty()) << schema << ": " << errors.front();
}

// Runs a session to the consented state and returns its id.
std::string Consented(PipelineService& s, ScenarioKind scenario,
                      std::vector<int> selection) {
  std::string id = s.CreateSession(scenario)->session_id;
  EXPECT_TRUE(s.SubmitConcerns(id, selection).ok());
  EXPECT_TRUE(s.GetNotification(id).ok());
  EXPECT_TRUE(s.SubmitConsent(id, ConsentDecision::kGranted).ok());
  return id;
}

TEST(Service, LocalSalaryWorkflow) {
  auto svc = MakeService(TestConfig());
  SessionRecord r = *svc->CreateSession("SalaryNumeric");
  EXPECT_EQ(r.state, SessionState::kCreated);
  EXPECT_EQ(r.session_id.rfind("s-", 0), 0u);

  r = *svc->SubmitConcerns(r.session_id, Ids({1, 5}));
  EXPECT_EQ(r.state, SessionState::kConcernsSubmitted);
  EXPECT_EQ(r.dp_level, DpLevel::kLocal);

  std::string bundle = *svc->GetNotification(r.session_id);
  nlohmann::json b = nlohmann::json::parse(bundle);
  ExpectSchema("notification.schema.json", b);
  EXPECT_EQ(b["dp_level"], "LocalDP");
  EXPECT_EQ(b["selection"], nlohmann::json({1, 5}));
  ASSERT_EQ(b["text"]["sentences"].size(), 2u);
  EXPECT_EQ(b["text_design_id"], "salary-local-text");
  EXPECT_EQ(b["storyboard_design_id"], "salary-local-storyboard");
  std::set<std::string> shown;
  for (const auto& ill : b["illustrations"]) shown.insert(ill["design_id"]);
  EXPECT_EQ(shown, (std::set<std::string>{"salary-local-repeated-trials",
                                          "salary-local-repeated-trials-many",
                                          "salary-local-probability-density"}));
  // Later fetches return the same bytes.
  EXPECT_EQ(*svc->GetNotification(r.session_id), bundle);
  r = *svc->GetSession(r.session_id);
  EXPECT_EQ(r.state, SessionState::kNotified);
  EXPECT_EQ(r.notification_id, b["notification_id"].get<std::string>());

  r = *svc->SubmitConsent(r.session_id, ConsentDecision::kGranted);
  EXPECT_EQ(r.state, SessionState::kConsented);

  Scenario salary = *svc->config().SalaryScenario();
  DataSubmission sub = *PrepareSubmission(DataValue(61'000.0), salary,
                                          DpLevel::kLocal, 1.0,
                                          std::optional<uint64_t>(1));
  r = *svc->SubmitData(r.session_id, sub);
  ASSERT_TRUE(r.submitted_data.has_value());
  EXPECT_FALSE(r.submitted_data->in_protected_store);
  EXPECT_EQ(r.submitted_data->perturbed_value, sub.value);
  EXPECT_EQ(r.submitted_data->mechanism_id, "laplace");

  r = *svc->SubmitRating(r.session_id, LikertItem::kClarity, 4,
                         "salary-local-probability-density");
  r = *svc->SubmitRating(r.session_id, LikertItem::kPersuasiveness, 5,
                         "salary-local-text");
  EXPECT_EQ(r.ratings.size(), 2u);
  ExpectSchema("session_record.schema.json", SessionRecordJson(r));
  for (const char* t : {"created", "concerns_submitted", "notified",
                        "consented", "data_submitted"}) {
    EXPECT_TRUE(r.timestamps.count(t)) << t;
  }
}

TEST(Service, EmptySelectionGoesCentralAndRawValueIsProtected) {
  auto svc = MakeService(TestConfig());
  std::string id = Consented(*svc, ScenarioKind::kLocationGeo, {});
  SessionRecord r = *svc->GetSession(id);
  EXPECT_EQ(r.dp_level, DpLevel::kCentral);
  r = *svc->SubmitData(id, DataSubmission{DataValue(std::string("C7")), false,
                                          ""});
  ASSERT_TRUE(r.submitted_data.has_value());
  EXPECT_TRUE(r.submitted_data->in_protected_store);
  EXPECT_FALSE(r.submitted_data->perturbed_value.has_value());
  nlohmann::json view = SessionRecordJson(r);
  EXPECT_EQ(view.dump().find("C7"), std::string::npos);

  std::vector<nlohmann::json> plain =
      *svc->ExportRecords(ExportFilter{}, kToken, false);
  ASSERT_EQ(plain.size(), 1u);
  EXPECT_FALSE(plain[0].contains("protected_value"));
  std::vector<nlohmann::json> full =
      *svc->ExportRecords(ExportFilter{}, kToken, true);
  EXPECT_EQ(full[0]["protected_value"], "C7");
}

TEST(Service, DeclinedSessionAcceptsNoData) {
  auto svc = MakeService(TestConfig());
  std::string id = svc->CreateSession(ScenarioKind::kSalaryNumeric)->session_id;
  ASSERT_TRUE(svc->SubmitConcerns(id, Ids({6})).ok());
  ASSERT_TRUE(svc->GetNotification(id).ok());
  EXPECT_EQ(svc->SubmitConsent(id, ConsentDecision::kDeclined)->state,
            SessionState::kDeclined);
  absl::StatusOr<SessionRecord> r =
      svc->SubmitData(id, DataSubmission{DataValue(10.0), false, ""});
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(r.status().message().find("declined"), std::string::npos);
  // Rating the explanation is still allowed after declining.
  EXPECT_TRUE(svc->SubmitRating(id, LikertItem::kClarity, 2,
                                "salary-central-text")
                  .ok());
}

TEST(Service, ValidationErrors) {
  auto svc = MakeService(TestConfig());
  EXPECT_EQ(svc->GetSession("s-nope").status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(svc->CreateSession("Weather").status().code(),
            absl::StatusCode::kInvalidArgument);
  std::string id = svc->CreateSession(ScenarioKind::kSalaryNumeric)->session_id;
  EXPECT_EQ(svc->SubmitConcerns(id, Ids({0})).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(svc->SubmitConcerns(id, Ids({2, 2})).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(svc->GetNotification(id).status().code(),
            absl::StatusCode::kFailedPrecondition);
  ASSERT_TRUE(svc->SubmitConcerns(id, Ids({3})).ok());
  ASSERT_TRUE(svc->GetNotification(id).ok());
  EXPECT_EQ(svc->SubmitConsent(id, ConsentDecision::kPending).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(svc->SubmitRating(id, LikertItem::kClarity, 0, "salary-local-text")
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(svc->SubmitRating(id, LikertItem::kClarity, 3, "no-such-design")
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  ASSERT_TRUE(svc->SubmitConsent(id, ConsentDecision::kGranted).ok());
  // LocalDP: raw values are refused outright.
  absl::StatusOr<SessionRecord> raw =
      svc->SubmitData(id, DataSubmission{DataValue(55'000.0), false, ""});
  EXPECT_EQ(raw.status().code(), absl::StatusCode::kPermissionDenied);
  EXPECT_NE(raw.status().message().find("local-dp-violation"),
            std::string::npos);
  EXPECT_EQ(svc->SubmitData(id, DataSubmission{DataValue(5.0), true, "k_rr"})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(svc->SubmitData(id, DataSubmission{DataValue(1e12), true, ""})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(svc->SubmitData(id, DataSubmission{DataValue(std::string("C1")),
                                               true, ""})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(svc->GetSession(id)->submitted_data.has_value());
  // Perturbed values may fall outside the clamp interval.
  EXPECT_TRUE(
      svc->SubmitData(id, DataSubmission{DataValue(-250'000.0), true, ""}).ok());
  EXPECT_EQ(svc->SubmitData(id, DataSubmission{DataValue(1.0), true, ""})
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(Service, CentralRejectsFlaggedOrOutOfDomainValues) {
  auto svc = MakeService(TestConfig());
  std::string id = Consented(*svc, ScenarioKind::kSalaryNumeric, {5});
  EXPECT_EQ(svc->SubmitData(id, DataSubmission{DataValue(10.0), true, ""})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(svc->SubmitData(id, DataSubmission{DataValue(-1.0), false, ""})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_TRUE(
      svc->SubmitData(id, DataSubmission{DataValue(1'000'000.0), false, ""})
          .ok());
}

// Operation alphabet for the model check.
TEST(ServiceModelCheck, AllSequencesUpToLengthSix) {
  testing::ModelCheckResult r = testing::RunModelCheck(6);
  // 2 levels x sum_{k=0..6} 6^k.
  EXPECT_EQ(r.sequences, 2 * 55987);
  for (const std::string& f : r.failures) ADD_FAILURE() << f;
}

TEST(ServiceHygiene, LocalDpRawValueNeverPersisted) {
  testing::TempDir dir;
  for (const std::string& f : testing::RunHygieneCheck(dir.path(), 40)) {
    ADD_FAILURE() << f;
  }
}

struct Observed {
  std::map<std::string, std::string> records;
  std::map<std::string, std::string> bundles;
  double remaining;
  std::string export_dump;
};

Observed Observe(PipelineService& svc, const std::vector<std::string>& ids) {
  Observed o;
  for (const std::string& id : ids) {
    const SessionRecord r = *svc.GetSession(id);
    o.records[id] = SessionRecordJson(r).dump();
    // Fetching a bundle notifies, so only read the ones already assembled.
    if (r.state != SessionState::kCreated &&
        r.state != SessionState::kConcernsSubmitted) {
      o.bundles[id] = *svc.GetNotification(id);
    }
  }
  o.remaining = svc.remaining_budget();
  std::vector<nlohmann::json> records = *svc.ExportRecords({}, kToken, true);
  for (const nlohmann::json& j : records) {
    o.export_dump += j.dump() + "\n";
  }
  return o;
}

// Mixed workload: every lifecycle stage, both levels, some queries.
std::vector<std::string> Populate(PipelineService& svc) {
  std::vector<std::string> ids;
  Scenario salary = *svc.config().SalaryScenario();
  for (int i = 0; i < 12; ++i) {
    ScenarioKind sc =
        i % 2 ? ScenarioKind::kLocationGeo : ScenarioKind::kSalaryNumeric;
    std::vector<int> sel = i % 3 ? std::vector<int>{2, 7} : std::vector<int>{6};
    std::string id = svc.CreateSession(sc)->session_id;
    ids.push_back(id);
    if (i % 6 == 0) continue;
    EXPECT_TRUE(svc.SubmitConcerns(id, sel).ok());
    if (i % 6 == 1) continue;
    EXPECT_TRUE(svc.GetNotification(id).ok());
    EXPECT_TRUE(svc.SubmitRating(id, LikertItem::kClarity, 1 + i % 5,
                                 svc.registry().designs()[i].design_id)
                    .ok());
    if (i % 6 == 2) continue;
    if (i % 6 == 3) {
      EXPECT_TRUE(svc.SubmitConsent(id, ConsentDecision::kDeclined).ok());
      continue;
    }
    EXPECT_TRUE(svc.SubmitConsent(id, ConsentDecision::kGranted).ok());
    const DpLevel level = *svc.GetSession(id)->dp_level;
    DataValue raw = sc == ScenarioKind::kSalaryNumeric
                        ? DataValue(40'000.0 + 1'000.5 * i)
                        : DataValue(std::string("C3"));
    DataSubmission sub = *PrepareSubmission(
        raw, svc.engine().scenario(sc), level, svc.config().local_epsilon,
        std::optional<uint64_t>(i));
    EXPECT_TRUE(svc.SubmitData(id, sub).ok());
  }
  EXPECT_TRUE(svc.AnswerQuery({ScenarioKind::kSalaryNumeric, QueryKind::kCount,
                               0.5, ""},
                              kToken)
                  .ok());
  EXPECT_TRUE(svc.AnswerQuery({ScenarioKind::kLocationGeo,
                               QueryKind::kHistogram, 1.25, "hist-1"},
                              kToken)
                  .ok());
  return ids;
}

void ExpectSameObservation(const Observed& a, const Observed& b) {
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.bundles, b.bundles);
  EXPECT_EQ(a.remaining, b.remaining);
  EXPECT_EQ(a.export_dump, b.export_dump);
}

TEST(ServiceRestart, ReplayReproducesRecordsAndBundlesByteForByte) {
  for (int snapshot_every : {1000, 7, 1}) {
    testing::TempDir dir;
    ServiceConfig config = TestConfig();
    config.storage_path = dir.path().string();
    config.snapshot_every = snapshot_every;
    std::vector<std::string> ids;
    Observed before;
    {
      auto svc = MakeService(config);
      ids = Populate(*svc);
      before = Observe(*svc, ids);
    }
    EXPECT_EQ(before.remaining, 10.0 - 0.5 - 1.25);
    auto again = MakeService(config);
    EXPECT_EQ(again->session_count(), ids.size());
    ExpectSameObservation(before, Observe(*again, ids));
  }
}

TEST(ServiceRestart, TornTailIsIgnored) {
  testing::TempDir dir;
  ServiceConfig config = TestConfig();
  config.storage_path = dir.path().string();
  std::vector<std::string> ids;
  Observed before;
  {
    auto svc = MakeService(config);
    ids = Populate(*svc);
    before = Observe(*svc, ids);
  }
  {
    std::ofstream out(dir.path() / "events.jsonl", std::ios::app);
    out << R"({"type":"session_created","session_id":"s-torn","sc)";
  }
  auto again = MakeService(config);
  ExpectSameObservation(before, Observe(*again, ids));
  // The service keeps writing after a torn tail.
  std::string id = again->CreateSession(ScenarioKind::kSalaryNumeric)->session_id;
  auto third = MakeService(config);
  EXPECT_TRUE(third->GetSession(id).ok());
}

TEST(ServiceRestart, CorruptLogRefusesToStart) {
  testing::TempDir dir;
  ServiceConfig config = TestConfig();
  config.storage_path = dir.path().string();
  {
    auto svc = MakeService(config);
    Populate(*svc);
  }
  std::string bytes = testing::ReadFile(dir.path() / "events.jsonl");
  bytes.insert(bytes.find('\n') + 1, "not json\n");
  std::ofstream(dir.path() / "events.jsonl", std::ios::trunc) << bytes;
  absl::StatusOr<std::unique_ptr<PipelineService>> s = PipelineService::Create(
      config, &testing::ShippedRegistry(), &testing::ShippedTemplates());
  EXPECT_EQ(s.status().code(), absl::StatusCode::kDataLoss);
}

TEST(ServiceRestart, BudgetSurvivesRestart) {
  testing::TempDir dir;
  ServiceConfig config = TestConfig();
  config.storage_path = dir.path().string();
  config.total_budget = 1.0;
  {
    auto svc = MakeService(config);
    ASSERT_TRUE(svc->AnswerQuery({ScenarioKind::kSalaryNumeric,
                                  QueryKind::kCount, 0.75, ""},
                                 kToken)
                    .ok());
  }
  auto again = MakeService(config);
  EXPECT_DOUBLE_EQ(again->remaining_budget(), 0.25);
  EXPECT_EQ(again->AnswerQuery({ScenarioKind::kSalaryNumeric,
                                QueryKind::kCount, 0.5, ""},
                               kToken)
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_DOUBLE_EQ(again->remaining_budget(), 0.25);
}

TEST(ServiceConcurrency, ParallelSessionsMatchSerialOutcome) {
  ServiceConfig config = TestConfig();
  config.illustration_dataset_size = 50;
  auto svc = MakeService(config);
  constexpr int kThreads = 8, kPerThread = 25;
  std::atomic<int> failures{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < kPerThread; ++i) {
        ScenarioKind sc = (t + i) % 2 ? ScenarioKind::kLocationGeo
                                      : ScenarioKind::kSalaryNumeric;
        std::vector<int> sel =
            i % 2 ? std::vector<int>{4} : std::vector<int>{5, 6};
        absl::StatusOr<SessionRecord> r = svc->CreateSession(sc);
        if (!r.ok()) {
          ++failures;
          continue;
        }
        const std::string id = r->session_id;
        failures += !svc->SubmitConcerns(id, sel).ok();
        failures += !svc->GetNotification(id).ok();
        failures += !svc->SubmitConsent(id, ConsentDecision::kGranted).ok();
        const DpLevel level = *svc->GetSession(id)->dp_level;
        DataValue raw = sc == ScenarioKind::kSalaryNumeric
                            ? DataValue(1000.0 * i)
                            : DataValue(std::string("C1"));
        DataSubmission sub = *PrepareSubmission(
            raw, svc->engine().scenario(sc), level, 1.0,
            std::optional<uint64_t>(t * 1000 + i));
        failures += !svc->SubmitData(id, sub).ok();
        // A second submission must lose, whichever thread sends it.
        failures += svc->SubmitData(id, sub).ok();
      }
    });
  }
  // Queries race with the sessions; each either fits or is refused cleanly.
  std::thread queries([&] {
    for (int i = 0; i < 30; ++i) {
      (void)svc->AnswerQuery(
          {ScenarioKind::kSalaryNumeric, QueryKind::kCount, 0.5, ""}, kToken);
    }
  });
  for (std::thread& t : threads) t.join();
  queries.join();
  EXPECT_EQ(failures.load(), 0);
  EXPECT_EQ(svc->session_count(), size_t{kThreads * kPerThread});
  EXPECT_GE(svc->remaining_budget(), 0.0);
  EXPECT_NEAR(svc->remaining_budget(), 0.0, 1e-9);
  std::vector<nlohmann::json> all =
      *svc->ExportRecords({}, kToken, false);
  ASSERT_EQ(all.size(), size_t{kThreads * kPerThread});
  for (const nlohmann::json& j : all) {
    EXPECT_EQ(j["state"], "consented");
    EXPECT_FALSE(j["submitted_data"].is_null());
  }
}

TEST(ServiceExport, FiltersAndToken) {
  auto svc = MakeService(TestConfig());
  std::vector<std::string> ids = Populate(*svc);
  EXPECT_EQ(svc->ExportRecords({}, "wrong", false).status().code(),
            absl::StatusCode::kUnauthenticated);
  EXPECT_EQ(svc->ExportRecords({}, "", false).status().code(),
            absl::StatusCode::kUnauthenticated);
  ExportFilter local;
  local.dp_level = DpLevel::kLocal;
  std::vector<nlohmann::json> local_records =
      *svc->ExportRecords(local, kToken, true);
  for (const nlohmann::json& j : local_records) {
    EXPECT_EQ(j["dp_level"], "LocalDP");
    EXPECT_FALSE(j.contains("protected_value"));
  }
  ExportFilter created;
  created.state = SessionState::kCreated;
  EXPECT_EQ(svc->ExportRecords(created, kToken, false)->size(), 2u);
  ExportFilter location;
  location.scenario = ScenarioKind::kLocationGeo;
  EXPECT_EQ(svc->ExportRecords(location, kToken, false)->size(), 6u);
  testing::SchemaValidator v = testing::LoadSchema("session_record.schema.json");
  std::vector<nlohmann::json> all_records =
      *svc->ExportRecords({}, kToken, true);
  for (const nlohmann::json& j : all_records) {
    std::vector<std::string> errors = v.Validate(j);
    EXPECT_TRUE(errors.empty()) << errors.front();
  }

  ServiceConfig no_token = TestConfig();
  no_token.operator_token.clear();
  auto closed = MakeService(no_token);
  absl::StatusOr<std::vector<nlohmann::json>> denied =
      closed->ExportRecords({}, "", false);
  EXPECT_EQ(denied.status().code(), absl::StatusCode::kUnauthenticated);
  EXPECT_NE(denied.status().message().find("disabled"), std::string::npos);
}

TEST(ServiceQueries, ProtectedStoreAnswersAndDebits) {
  ServiceConfig config = TestConfig();
  config.total_budget = 2.0;
  auto svc = MakeService(config);
  for (int i = 0; i < 30; ++i) {
    std::string id = Consented(*svc, ScenarioKind::kSalaryNumeric, {7});
    ASSERT_TRUE(
        svc->SubmitData(id, DataSubmission{DataValue(1000.0 * i), false, ""})
            .ok());
  }
  // LocalDP values never enter the protected store.
  std::string local = Consented(*svc, ScenarioKind::kSalaryNumeric, {1});
  ASSERT_TRUE(
      svc->SubmitData(local, DataSubmission{DataValue(5.0), true, ""}).ok());

  ProtectedQueryResult r =
      *svc->AnswerQuery({ScenarioKind::kSalaryNumeric, QueryKind::kMean, 1.0,
                         "mean-1"},
                        kToken);
  EXPECT_EQ(r.records, 30);
  EXPECT_EQ(r.answer.query_id, "mean-1");
  EXPECT_FALSE(r.answer.seed.has_value());
  EXPECT_DOUBLE_EQ(r.answer.noise_scale, 1'000'000.0 / 30);
  EXPECT_DOUBLE_EQ(r.remaining_budget, 1.0);
  nlohmann::json j = ProtectedQueryResultJson(r);
  ExpectSchema("query_answer.schema.json", j);
  EXPECT_TRUE(j["seed"].is_null());

  ProtectedQueryResult count = *svc->AnswerQuery(
      {ScenarioKind::kSalaryNumeric, QueryKind::kCount, std::nullopt, ""},
      kToken);
  EXPECT_EQ(count.answer.query_id, "q-2");
  EXPECT_EQ(count.answer.epsilon, 1.0);
  EXPECT_DOUBLE_EQ(count.remaining_budget, 0.0);
  EXPECT_EQ(svc->AnswerQuery({ScenarioKind::kSalaryNumeric, QueryKind::kCount,
                              0.1, ""},
                             kToken)
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_EQ(svc->AnswerQuery({ScenarioKind::kSalaryNumeric, QueryKind::kCount,
                              0.1, ""},
                             "bad")
                .status()
                .code(),
            absl::StatusCode::kUnauthenticated);
  EXPECT_DOUBLE_EQ(svc->remaining_budget(), 0.0);
}

TEST(ServiceQueries, RejectedQueryLeavesBudgetUnchanged) {
  auto svc = MakeService(TestConfig());
  const double before = svc->remaining_budget();
  EXPECT_FALSE(svc->AnswerQuery({ScenarioKind::kSalaryNumeric, QueryKind::kMean,
                                 1.0, ""},
                                kToken)
                   .ok());
  EXPECT_FALSE(svc->AnswerQuery({ScenarioKind::kLocationGeo, QueryKind::kMean,
                                 1.0, ""},
                                kToken)
                   .ok());
  EXPECT_FALSE(svc->AnswerQuery({ScenarioKind::kLocationGeo, QueryKind::kCount,
                                 0.0, ""},
                                kToken)
                   .ok());
  EXPECT_FALSE(svc->AnswerQuery({ScenarioKind::kLocationGeo, QueryKind::kCount,
                                 100.0, ""},
                                kToken)
                   .ok());
  EXPECT_EQ(svc->remaining_budget(), before);
}

TEST(ServiceMisc, ClientMechanismsAndCreateValidation) {
  auto svc = MakeService(TestConfig());
  nlohmann::json j = svc->ClientMechanismJson();
  ExpectSchema("client_mechanisms.schema.json", j);
  EXPECT_EQ(j["SalaryNumeric"]["scale"], 1'000'000.0);
  EXPECT_EQ(j["LocationGeo"]["mechanism_id"], "k_rr");

  // A template set missing one pair cannot back a service.
  auto partial = TemplateStore::FromTemplates(
      {**testing::ShippedTemplates().Get(ScenarioKind::kSalaryNumeric,
                                         DpLevel::kLocal)});
  EXPECT_FALSE(PipelineService::Create(TestConfig(), &testing::ShippedRegistry(),
                                       partial.get())
                   .ok());
  ServiceConfig bad = TestConfig();
  bad.local_epsilon = -1;
  EXPECT_FALSE(PipelineService::Create(bad, &testing::ShippedRegistry(),
                                       &testing::ShippedTemplates())
                   .ok());
}

TEST(ServiceMisc, InjectedClockStampsEvents) {
  ServiceOptions options;
  options.clock = [] { return absl::FromUnixMillis(1'800'000'000'123); };
  auto svc = MakeService(TestConfig(), options);
  SessionRecord r = *svc->CreateSession(ScenarioKind::kSalaryNumeric);
  EXPECT_EQ(FormatTimestamp(r.timestamps.at("created")),
            "2027-01-15T08:00:00.123Z");
}

}  // namespace
}  // namespace dpconsent
