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

#include "dpconsent/design_payloads.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpconsent/budget_ledger.h"
#include "dpconsent/illustrations.h"
#include "dpconsent/random.h"
#include "dpconsent/storyboard.h"

namespace dpconsent {
namespace {

// Skewed towards the low end of the range, like real salaries and like
// foot traffic that concentrates in a few areas.
std::vector<DataValue> SyntheticRecords(const Scenario& scenario, int n,
                                        uint64_t seed) {
  Rng rng(seed);
  std::vector<DataValue> records;
  records.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.UniformOpen01();
    if (scenario.kind() == ScenarioKind::kSalaryNumeric) {
      const NumericDomain& d = scenario.numeric();
      records.emplace_back(d.lo() + d.width() * u * u * u);
    } else {
      const CellGrid& g = scenario.grid();
      records.emplace_back(g.name(static_cast<int>(u * u * g.size())));
    }
  }
  return records;
}

}  // namespace

absl::StatusOr<IllustrationEngine> IllustrationEngine::Create(
    const ServiceConfig& config, const TemplateStore* templates) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<Scenario> salary = config.SalaryScenario();
  if (!salary.ok()) return salary.status();
  absl::StatusOr<Scenario> location = config.LocationScenario();
  if (!location.ok()) return location.status();
  IllustrationEngine engine(config, *salary, *location, templates);
  engine.salary_records_ =
      SyntheticRecords(engine.salary_, config.illustration_dataset_size,
                       config.illustration_seed);
  engine.location_records_ =
      SyntheticRecords(engine.location_, config.illustration_dataset_size,
                       config.illustration_seed + 1);
  return engine;
}

absl::StatusOr<nlohmann::json> IllustrationEngine::Generate(
    const DesignDescriptor& design, const PayloadRequest& request) const {
  absl::StatusOr<nlohmann::json> payload = Payload(design, request);
  if (!payload.ok()) return payload.status();
  return nlohmann::json{{"design_id", design.design_id},
                        {"scenario", ScenarioName(design.scenario)},
                        {"dp_level", DpLevelName(design.dp_level)},
                        {"category", DesignCategoryName(design.category)},
                        {"title", design.title},
                        {"payload", std::move(*payload)}};
}

absl::StatusOr<nlohmann::json> IllustrationEngine::Payload(
    const DesignDescriptor& design, const PayloadRequest& request) const {
  const Scenario& sc = scenario(design.scenario);
  const bool salary = design.scenario == ScenarioKind::kSalaryNumeric;
  const DataValue example = salary ? DataValue(config_.example_salary)
                                   : DataValue(config_.example_cell);

  switch (design.generator) {
    case PayloadGenerator::kText: {
      if (templates_ == nullptr) {
        return absl::FailedPreconditionError("no template store configured");
      }
      absl::StatusOr<ConcernSet> all = ConcernSet::FromMask(0x7f);
      absl::StatusOr<TextBlock> block = templates_->Render(
          design.scenario, design.dp_level, request.selection.value_or(*all));
      if (!block.ok()) return block.status();
      nlohmann::json j = TextBlockJson(*block);
      j["type"] = "text";
      j["schema_version"] = 1;
      return j;
    }
    case PayloadGenerator::kRepeatedTrials: {
      absl::StatusOr<MechanismParams> params =
          MechanismParams::ForLocal(sc, config_.local_epsilon);
      if (!params.ok()) return params.status();
      absl::StatusOr<TrialsPayload> p = GenerateRepeatedTrials(
          example, sc, *params, design.trial_count.value_or(config_.trial_count),
          request.seed);
      if (!p.ok()) return p.status();
      return TrialsJson(*p);
    }
    case PayloadGenerator::kDataDistribution: {
      absl::StatusOr<MechanismParams> params =
          MechanismParams::Create(config_.central_epsilon, 1.0, sc.domain());
      if (!params.ok()) return params.status();
      // One histogram of synthetic records; its own budget.
      absl::StatusOr<BudgetLedger> ledger =
          BudgetLedger::Create(config_.central_epsilon);
      if (!ledger.ok()) return ledger.status();
      absl::StatusOr<DistributionPayload> p = GenerateDistribution(
          example_dataset(design.scenario), sc, *params, *ledger, request.seed,
          config_.histogram_bins);
      if (!p.ok()) return p.status();
      return DistributionJson(*p);
    }
    case PayloadGenerator::kDotplot: {
      absl::StatusOr<DotplotPayload> p;
      std::string quantity;
      if (design.dp_level == DpLevel::kLocal) {
        absl::StatusOr<MechanismParams> params =
            MechanismParams::ForLocal(sc, config_.local_epsilon);
        if (!params.ok()) return params.status();
        p = GenerateDotplot(config_.example_salary, sc, *params,
                            config_.ball_count);
        quantity = "reported_salary";
      } else if (salary) {
        const std::vector<DataValue>& records = salary_records_;
        double sum = 0;
        for (const DataValue& v : records) sum += std::get<double>(v);
        const double n = static_cast<double>(records.size());
        const double mean = sum / n;
        const double scale = sc.numeric().width() / (n * config_.central_epsilon);
        p = GenerateDotplot(mean, scale, config_.ball_count, mean);
        quantity = "noisy_mean_salary";
      } else {
        int64_t count = 0;
        for (const DataValue& v : location_records_) {
          count += std::get<std::string>(v) == config_.example_cell;
        }
        const double c = static_cast<double>(count);
        p = GenerateDotplot(c, 1.0 / config_.central_epsilon,
                            config_.ball_count, c);
        quantity = absl::StrCat("noisy_count:", config_.example_cell);
      }
      if (!p.ok()) return p.status();
      nlohmann::json j = DotplotJson(*p);
      j["quantity"] = quantity;
      return j;
    }
    case PayloadGenerator::kCellProbs: {
      absl::StatusOr<MechanismParams> params =
          MechanismParams::ForLocal(sc, config_.local_epsilon);
      if (!params.ok()) return params.status();
      CellPresentation presentation = request.presentation.value_or(
          design.presentation.value_or(CellPresentation::kTable));
      absl::StatusOr<CellProbPayload> p =
          GenerateCellProbs(config_.example_cell, *params, presentation);
      if (!p.ok()) return p.status();
      return CellProbsJson(*p);
    }
    case PayloadGenerator::kStoryboard:
      return StoryboardJson(BuildStoryboard(design.scenario, design.dp_level));
  }
  return absl::InternalError("unhandled payload generator");
}

}  // namespace dpconsent
