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

// Acceptance run: one PASS/FAIL line per criterion; exits non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "dpconsent/budget_ledger.h"
#include "dpconsent/concern.h"
#include "dpconsent/design_registry.h"
#include "dpconsent/dp_verifier.h"
#include "dpconsent/http_api.h"
#include "dpconsent/illustrations.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/random.h"
#include "dpconsent/scenario.h"
#include "dpconsent/storyboard.h"
#include "dpconsent/text_templates.h"
#include "httplib.h"
#include "testing/fixtures.h"
#include "testing/model_check.h"
#include "testing/schema_validator.h"

namespace dpconsent {
namespace {

// Pinned tolerances and limits.
constexpr double kRrFrequencyTolerance = 0.005;
constexpr int kRrDraws = 1'000'000;
constexpr double kRrSeconds = 30;
constexpr double kConcernSeconds = 1;
constexpr double kVerifierTolerance = 1e-9;
constexpr double kVerifierSeconds = 5;
constexpr int kLaplaceSamples = 1'000'000;
constexpr double kLaplaceVarianceTolerance = 0.05;
constexpr double kLaplaceRatioLo = 3.8;
constexpr double kLaplaceRatioHi = 4.2;
constexpr double kLaplaceSeconds = 30;
constexpr double kDotplotTolerance = 1e-9;
constexpr int kModelCheckLength = 6;
constexpr double kLn3 = 1.0986122886681098;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void Check(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  std::ostringstream& detail() { return detail_; }
  const std::string& name() const { return name_; }
  bool passed() const { return failed_ == 0; }

  void Print(double seconds) const {
    std::printf("%s %s (%.2fs)%s%s\n", passed() ? "PASS" : "FAIL",
                name_.c_str(), seconds, detail_.str().empty() ? "" : " ",
                detail_.str().c_str());
    for (const std::string& f : failures_) {
      std::printf("    %s\n", f.c_str());
    }
    if (failed_ > static_cast<int>(failures_.size())) {
      std::printf("    ... %d more\n",
                  failed_ - static_cast<int>(failures_.size()));
    }
  }

 private:
  std::string name_;
  std::ostringstream detail_;
  std::vector<std::string> failures_;
  int failed_ = 0;
};

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// --- concern mapping -------------------------------------------------------

void ConcernMapping(Criterion& c) {
  int local = 0;
  for (uint32_t mask = 0; mask < 128; ++mask) {
    std::vector<int> ids;
    for (int i = 1; i <= 7; ++i) {
      if (mask & (1u << (i - 1))) ids.push_back(i);
    }
    // Local whenever any of concerns 1..4 is present; the empty selection
    // falls to central.
    const bool oracle_local = std::any_of(ids.begin(), ids.end(),
                                          [](int i) { return i <= 4; });
    absl::StatusOr<DpLevel> level = MatchDpLevel(ids);
    c.Check(level.ok(), "mask " + std::to_string(mask) + " rejected");
    if (!level.ok()) continue;
    const DpLevel expected = oracle_local ? DpLevel::kLocal : DpLevel::kCentral;
    c.Check(*level == expected, "mask " + std::to_string(mask) + " maps to " +
                                    std::string(DpLevelName(*level)));
    local += *level == DpLevel::kLocal;
  }
  c.detail() << "subsets=128 local=" << local;
}

// --- randomized response ---------------------------------------------------

void RandomizedResponse(Criterion& c) {
  double worst = 0;
  for (int k : {2, 4, 9}) {
    for (double eps : {kLn3, 1.0}) {
      const double expected = std::exp(eps) / (std::exp(eps) + k - 1);
      Rng rng(1000 + static_cast<uint64_t>(k * 10 + eps * 100));
      const int truth = k / 2;
      int64_t kept = 0;
      for (int i = 0; i < kRrDraws; ++i) {
        kept += RrPerturbIndex(truth, k, eps, rng) == truth;
      }
      const double freq = static_cast<double>(kept) / kRrDraws;
      worst = std::max(worst, std::abs(freq - expected));
      c.Check(std::abs(freq - expected) <= kRrFrequencyTolerance,
              "k=" + std::to_string(k) + " eps=" + Fmt(eps) + " freq " +
                  Fmt(freq) + " expected " + Fmt(expected));
    }
  }
  c.detail() << "max|freq-p|=" << Fmt(worst);
}

// --- dp verifier -----------------------------------------------------------

void Verifier(Criterion& c) {
  double worst_err = 0;
  for (int k = 2; k <= 10; ++k) {
    for (double eps : {0.1, 0.5, 1.0, 2.0}) {
      absl::StatusOr<TransitionMatrix> m = RandomizedResponseMatrix(k, eps);
      c.Check(m.ok(), "rr matrix k=" + std::to_string(k));
      if (!m.ok()) continue;
      absl::StatusOr<VerificationReport> r = VerifyDpBound(*m, eps);
      c.Check(r.ok(), "verify failed k=" + std::to_string(k));
      if (!r.ok()) continue;
      const double err = std::abs(r->worst_ratio - std::exp(eps));
      worst_err = std::max(worst_err, err);
      c.Check(r->holds, "rr k=" + std::to_string(k) + " eps=" + Fmt(eps) +
                            " reported violated");
      c.Check(err <= kVerifierTolerance,
              "rr k=" + std::to_string(k) + " eps=" + Fmt(eps) +
                  " worst ratio " + Fmt(r->worst_ratio));
    }
  }
  for (int k : {2, 5, 10}) {
    absl::StatusOr<VerificationReport> id = VerifyDpBound(IdentityMatrix(k), 1.0);
    c.Check(id.ok() && !id->holds,
            "identity k=" + std::to_string(k) + " not violated");
  }
  c.detail() << "max|ratio-e^eps|=" << Fmt(worst_err);
}

// --- laplace moments -------------------------------------------------------

struct Moments {
  double mean;
  double variance;
};

Moments SampleMoments(double x, double sensitivity, double eps, uint64_t seed) {
  const NumericDomain domain = *NumericDomain::Create(-1e9, 1e9, "");
  MechanismParams p = *MechanismParams::Create(eps, sensitivity, domain);
  Rng rng(seed);
  double mean = 0, m2 = 0;
  for (int i = 1; i <= kLaplaceSamples; ++i) {
    const double y =
        std::get<double>(LaplacePerturb(x, p, rng)->output_value);
    const double d = y - mean;
    mean += d / i;
    m2 += d * (y - mean);
  }
  return {mean, m2 / (kLaplaceSamples - 1)};
}

void LaplaceMoments(Criterion& c) {
  const double x = 50'000, delta = 1'000, eps = 0.5;
  const double b = delta / eps;
  const double expected_var = 2 * b * b;
  const Moments a = SampleMoments(x, delta, eps, 101);
  const Moments d = SampleMoments(x, delta, 2 * eps, 202);
  const double mean_tol = 3 * std::sqrt(expected_var / kLaplaceSamples);
  c.Check(std::abs(a.mean - x) <= mean_tol,
          "mean " + Fmt(a.mean) + " outside " + Fmt(x) + "+-" + Fmt(mean_tol));
  c.Check(std::abs(a.variance / expected_var - 1) <= kLaplaceVarianceTolerance,
          "variance " + Fmt(a.variance) + " expected " + Fmt(expected_var));
  const double ratio = a.variance / d.variance;
  c.Check(ratio >= kLaplaceRatioLo && ratio <= kLaplaceRatioHi,
          "doubling ratio " + Fmt(ratio));
  c.detail() << "mean-x=" << Fmt(a.mean - x) << " var/2b^2="
             << Fmt(a.variance / expected_var) << " ratio=" << Fmt(ratio);
}

// --- dotplot ---------------------------------------------------------------

// Inverse of the double-exponential CDF, written out piecewise.
double ClosedFormQuantile(double q, double mu, double b) {
  return q < 0.5 ? mu + b * std::log(2 * q) : mu - b * std::log(2 * (1 - q));
}

void Dotplot(Criterion& c) {
  double worst = 0;
  for (int n : {2, 3, 5, 10, 20, 21, 50, 100}) {
    for (double mu : {0.0, 10.0, 50'000.0}) {
      for (double b : {0.5, 1.0, 2000.0, 1e6}) {
        absl::StatusOr<DotplotPayload> p = GenerateDotplot(mu, b, n, mu);
        c.Check(p.ok() && p->ball_positions.size() == static_cast<size_t>(n),
                "dotplot n=" + std::to_string(n) + " failed");
        if (!p.ok() || p->ball_positions.size() != static_cast<size_t>(n)) {
          continue;
        }
        for (int i = 1; i <= n; ++i) {
          const double want = ClosedFormQuantile((i - 0.5) / n, mu, b);
          const double err = std::abs(p->ball_positions[i - 1] - want) /
                             std::max(1.0, std::abs(want));
          worst = std::max(worst, err);
          c.Check(err <= kDotplotTolerance,
                  "n=" + std::to_string(n) + " b=" + Fmt(b) + " ball " +
                      std::to_string(i) + " at " +
                      Fmt(p->ball_positions[i - 1]) + " want " + Fmt(want));
        }
        if (n % 2 == 0) {
          const auto below =
              std::count_if(p->ball_positions.begin(), p->ball_positions.end(),
                            [mu](double v) { return v <= mu; });
          c.Check(below == n / 2, "n=" + std::to_string(n) + " has " +
                                      std::to_string(below) + " balls <= center");
        }
      }
    }
  }
  c.detail() << "max rel err=" << Fmt(worst);
}

// --- registry and payload endpoints ----------------------------------------

void RegistryAndPayloads(Criterion& c) {
  const DesignRegistry& reg = testing::ShippedRegistry();
  int salary = 0, location = 0;
  std::set<std::string> ids;
  for (const DesignDescriptor& d : reg.designs()) {
    salary += d.scenario == ScenarioKind::kSalaryNumeric;
    location += d.scenario == ScenarioKind::kLocationGeo;
    ids.insert(d.design_id);
  }
  c.Check(reg.designs().size() == 17, "designs=" +
                                          std::to_string(reg.designs().size()));
  c.Check(salary == 9, "salary designs=" + std::to_string(salary));
  c.Check(location == 8, "location designs=" + std::to_string(location));
  c.Check(ids.size() == reg.designs().size(), "duplicate design ids");

  ServiceConfig config = testing::TestConfig();
  std::unique_ptr<PipelineService> svc = testing::MakeService(config);
  httplib::Server server;
  RegisterRoutes(server, *svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  c.Check(port > 0, "cannot bind a port");
  if (port <= 0) return;
  std::thread t([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  const testing::SchemaValidator envelope =
      testing::LoadSchema("payload_envelope.schema.json");
  const std::map<std::string, std::string> schema_for = {
      {"text", "text.schema.json"},
      {"trials", "trials.schema.json"},
      {"distribution", "distribution.schema.json"},
      {"dotplot", "dotplot.schema.json"},
      {"cell_probs", "cell_probs.schema.json"},
      {"storyboard", "storyboard.schema.json"}};
  int checked = 0;
  auto validate = [&](const std::string& path) {
    httplib::Result r = client.Get(path);
    if (!r || r->status != 200) {
      c.Check(false, path + " -> " + (r ? std::to_string(r->status) : "no reply"));
      return;
    }
    nlohmann::json j = nlohmann::json::parse(r->body, nullptr, false);
    c.Check(!j.is_discarded(), path + " body is not JSON");
    if (j.is_discarded()) return;
    std::vector<std::string> errors = envelope.Validate(j);
    c.Check(errors.empty(), path + " envelope: " +
                                (errors.empty() ? "" : errors.front()));
    const std::string type = j["payload"].value("type", "");
    auto it = schema_for.find(type);
    c.Check(it != schema_for.end(), path + " unknown payload type " + type);
    if (it == schema_for.end()) return;
    errors = testing::LoadSchema(it->second).Validate(j["payload"]);
    c.Check(errors.empty(), path + " payload: " +
                                (errors.empty() ? "" : errors.front()));
    ++checked;
  };
  for (const DesignDescriptor& d : reg.designs()) {
    validate("/designs/" + d.design_id + "/payload");
    validate("/designs/" + d.design_id + "/payload?seed=3");
  }
  for (const char* p : {"table", "pie", "map"}) {
    validate(std::string("/designs/location-local-probability-map/payload?"
                         "presentation=") + p);
  }
  server.stop();
  t.join();
  c.detail() << "designs=" << reg.designs().size() << " salary=" << salary
             << " location=" << location << " bodies=" << checked;
}

// --- storyboards -----------------------------------------------------------

void Storyboards(Criterion& c) {
  int scripts = 0;
  for (ScenarioKind s : {ScenarioKind::kSalaryNumeric, ScenarioKind::kLocationGeo}) {
    for (DpLevel level : {DpLevel::kLocal, DpLevel::kCentral}) {
      const StoryboardScript script = BuildStoryboard(s, level);
      const std::string name = std::string(ScenarioName(s)) + "/" +
                               std::string(DpLevelName(level));
      ++scripts;
      for (const std::string& v : CheckStoryboard(script)) {
        c.Check(false, name + ": " + v);
      }
      // Recomputed here from the visible tags.
      bool raw_seen = false, noised = false, queried = false;
      for (const StoryboardStep& st : script.steps) {
        bool shows_raw = false;
        for (const TaggedValue& v : st.visible_data) {
          shows_raw |= v.tag == DataTag::kRaw;
        }
        if (level == DpLevel::kLocal) {
          c.Check(!(shows_raw && st.actor != Actor::kUserDevice),
                  name + ": raw value visible to " +
                      std::string(ActorName(st.actor)));
        } else {
          if (st.kind == StepKind::kQuery) {
            queried = true;
            c.Check(raw_seen, name + ": query before any raw value");
          }
          if (noised) {
            c.Check(!shows_raw, name + ": raw value after noise at step " +
                                    std::to_string(st.index));
          }
          if (st.kind == StepKind::kAddNoise) noised = true;
          raw_seen |= shows_raw;
        }
      }
      if (level == DpLevel::kCentral) {
        c.Check(queried, name + ": no query step");
        c.Check(noised, name + ": no noise step");
      } else {
        const bool perturbs = std::any_of(
            script.steps.begin(), script.steps.end(), [](const StoryboardStep& st) {
              return st.kind == StepKind::kPerturbOnDevice &&
                     st.actor == Actor::kUserDevice;
            });
        c.Check(perturbs, name + ": no on-device perturbation");
      }
    }
  }
  c.detail() << "scripts=" << scripts;
}

// --- service state machine and hygiene -------------------------------------

void StateMachine(Criterion& c) {
  testing::ModelCheckResult r = testing::RunModelCheck(kModelCheckLength);
  int64_t expected = 0, p = 1;
  for (int len = 0; len <= kModelCheckLength; ++len, p *= 6) expected += p;
  expected *= 2;
  c.Check(r.sequences == expected, "sequences " + std::to_string(r.sequences) +
                                       " expected " + std::to_string(expected));
  for (const std::string& f : r.failures) c.Check(false, f);
  testing::TempDir dir;
  std::vector<std::string> hygiene = testing::RunHygieneCheck(dir.path(), 40);
  for (const std::string& f : hygiene) c.Check(false, "hygiene: " + f);
  c.detail() << "sequences=" << r.sequences << " ops=" << r.operations
             << " hygiene sessions=40";
}

// --- budget ledger ---------------------------------------------------------

void Budget(Criterion& c) {
  Rng rng(77);
  int64_t debits = 0, rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double total = 0.25 + 4 * rng.UniformOpen01();
    BudgetLedger l = *BudgetLedger::Create(total);
    double oracle = 0;
    for (int step = 0; step < 50; ++step) {
      const double eps = 0.7 * rng.UniformOpen01();
      const double spent_before = l.spent();
      const size_t entries_before = l.entries().size();
      const bool fits = oracle + eps <= total * (1 + 1e-12);
      const absl::Status s = l.TryDebit("q", eps);
      ++debits;
      c.Check(s.ok() == fits, "trial " + std::to_string(trial) + " step " +
                                  std::to_string(step) + " disagrees");
      if (s.ok()) {
        oracle += eps;
      } else {
        ++rejected;
        c.Check(s.code() == absl::StatusCode::kFailedPrecondition,
                "rejection code " + s.ToString());
        c.Check(l.spent() == spent_before && l.entries().size() == entries_before,
                "rejected debit changed the ledger");
      }
      c.Check(total - l.spent() >= -total * 1e-12, "remaining below zero");
    }
  }
  // Concurrent interleavings.
  for (int round = 0; round < 20; ++round) {
    BudgetLedger l = *BudgetLedger::Create(2.0);
    std::vector<std::thread> threads;
    std::vector<int> accepted(8, 0);
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&l, &accepted, t] {
        for (int i = 0; i < 50; ++i) {
          accepted[t] += l.TryDebit("t", 0.013 * (1 + (i + t) % 5)).ok();
        }
      });
    }
    for (std::thread& t : threads) t.join();
    double sum = 0;
    for (const BudgetLedger::Entry& e : l.entries()) sum += e.epsilon;
    int total_accepted = 0;
    for (int a : accepted) total_accepted += a;
    c.Check(sum <= 2.0 * (1 + 1e-12), "concurrent overspend " + Fmt(sum));
    c.Check(static_cast<int>(l.entries().size()) == total_accepted,
            "entries differ from accepted debits");
    c.Check(std::abs(l.spent() - sum) <= 1e-9, "spent differs from entries");
  }
  c.detail() << "debits=" << debits << " rejected=" << rejected;
}

// --- templates -------------------------------------------------------------

void Templates(Criterion& c) {
  const TemplateStore& store = testing::ShippedTemplates();
  int renders = 0;
  for (ScenarioKind s : {ScenarioKind::kSalaryNumeric, ScenarioKind::kLocationGeo}) {
    for (DpLevel level : {DpLevel::kLocal, DpLevel::kCentral}) {
      const std::string name = std::string(ScenarioName(s)) + "/" +
                               std::string(DpLevelName(level));
      absl::StatusOr<std::shared_ptr<const TextTemplate>> t = store.Get(s, level);
      c.Check(t.ok(), name + ": missing template");
      if (!t.ok()) continue;
      for (const TemplateViolation& v : ValidateTemplate(**t).violations) {
        (void)v;
        c.Check(false, name + ": template fails validation");
      }
      for (uint32_t mask = 0; mask < 128; ++mask) {
        std::set<int> want;
        for (int i = 1; i <= 7; ++i) {
          if (mask & (1u << (i - 1))) want.insert(i);
        }
        const TextBlock b = RenderTextDescription(**t, *ConcernSet::FromMask(mask));
        std::set<int> got;
        for (const auto& [id, text] : b.sentences) {
          got.insert(id);
          c.Check(!text.empty(), name + ": empty sentence");
        }
        c.Check(got == want && b.sentences.size() == want.size(),
                name + " mask " + std::to_string(mask) + ": sentence set differs");
        ++renders;
      }
    }
  }
  c.detail() << "renders=" << renders;
}

struct Entry {
  const char* name;
  std::function<void(Criterion&)> run;
  double limit_seconds;  // 0: no limit
};

}  // namespace
}  // namespace dpconsent

int main() {
  using dpconsent::Criterion;
  const dpconsent::Entry entries[] = {
      {"concern-mapping", dpconsent::ConcernMapping, dpconsent::kConcernSeconds},
      {"randomized-response", dpconsent::RandomizedResponse,
       dpconsent::kRrSeconds},
      {"dp-verifier", dpconsent::Verifier, dpconsent::kVerifierSeconds},
      {"laplace-moments", dpconsent::LaplaceMoments, dpconsent::kLaplaceSeconds},
      {"dotplot-oracle", dpconsent::Dotplot, 0},
      {"registry-payloads", dpconsent::RegistryAndPayloads, 0},
      {"storyboard-invariants", dpconsent::Storyboards, 0},
      {"service-state-machine", dpconsent::StateMachine, 0},
      {"budget-ledger", dpconsent::Budget, 0},
      {"template-rendering", dpconsent::Templates, 0},
  };
  int failed = 0;
  for (const dpconsent::Entry& e : entries) {
    Criterion c(e.name);
    const auto start = std::chrono::steady_clock::now();
    e.run(c);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (e.limit_seconds > 0) {
      c.Check(seconds < e.limit_seconds,
              "runtime " + dpconsent::Fmt(seconds) + "s over limit " +
                  dpconsent::Fmt(e.limit_seconds) + "s");
    }
    c.Print(seconds);
    std::fflush(stdout);
    failed += !c.passed();
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(std::size(entries)) - failed, std::size(entries));
  return failed == 0 ? 0 : 1;
}
