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

#ifndef DPCONSENT_DESIGN_PAYLOADS_H_
#define DPCONSENT_DESIGN_PAYLOADS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "dpconsent/concern.h"
#include "dpconsent/config.h"
#include "dpconsent/design_registry.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/scenario.h"
#include "dpconsent/text_templates.h"
#include "json.hpp"

namespace dpconsent {

struct PayloadRequest {
  uint64_t seed = 0;
  // Sentences to include in text payloads; all seven when unset.
  std::optional<ConcernSet> selection;
  std::optional<CellPresentation> presentation;
};

// Turns a design descriptor into its JSON payload envelope:
//   {"design_id", "scenario", "dp_level", "category", "title",
//    "payload": {...}}
// Central-DP designs illustrate a synthetic example dataset drawn once from
// the configured illustration seed; they never read users' stored data.
class IllustrationEngine {
 public:
  static absl::StatusOr<IllustrationEngine> Create(
      const ServiceConfig& config, const TemplateStore* templates);

  absl::StatusOr<nlohmann::json> Generate(const DesignDescriptor& design,
                                          const PayloadRequest& request) const;

  const Scenario& scenario(ScenarioKind kind) const {
    return kind == ScenarioKind::kSalaryNumeric ? salary_ : location_;
  }
  const std::vector<DataValue>& example_dataset(ScenarioKind kind) const {
    return kind == ScenarioKind::kSalaryNumeric ? salary_records_
                                                : location_records_;
  }

 private:
  IllustrationEngine(ServiceConfig config, Scenario salary, Scenario location,
                     const TemplateStore* templates)
      : config_(std::move(config)),
        salary_(std::move(salary)),
        location_(std::move(location)),
        templates_(templates) {}

  absl::StatusOr<nlohmann::json> Payload(const DesignDescriptor& design,
                                         const PayloadRequest& request) const;

  ServiceConfig config_;
  Scenario salary_;
  Scenario location_;
  const TemplateStore* templates_;
  std::vector<DataValue> salary_records_;
  std::vector<DataValue> location_records_;
};

}  // namespace dpconsent

#endif  // DPCONSENT_DESIGN_PAYLOADS_H_
