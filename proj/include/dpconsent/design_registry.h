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

#ifndef DPCONSENT_DESIGN_REGISTRY_H_
#define DPCONSENT_DESIGN_REGISTRY_H_

#include <filesystem>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpconsent/concern.h"
#include "dpconsent/illustrations.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

enum class DesignCategory { kText, kInputOutput, kProbDist, kStoryboard };

inline constexpr DesignCategory kAllCategories[] = {
    DesignCategory::kText, DesignCategory::kInputOutput,
    DesignCategory::kProbDist, DesignCategory::kStoryboard};

absl::string_view DesignCategoryName(DesignCategory c);
absl::StatusOr<DesignCategory> ParseDesignCategory(absl::string_view name);

// Which payload builder backs a design.
enum class PayloadGenerator {
  kText,
  kRepeatedTrials,
  kDataDistribution,
  kDotplot,
  kCellProbs,
  kStoryboard,
};

absl::string_view PayloadGeneratorName(PayloadGenerator g);
absl::StatusOr<PayloadGenerator> ParsePayloadGenerator(absl::string_view name);

struct DesignDescriptor {
  std::string design_id;
  ScenarioKind scenario;
  DpLevel dp_level;
  DesignCategory category;
  std::string title;
  PayloadGenerator generator;
  std::optional<CellPresentation> presentation;
  std::optional<int> trial_count;
  // Second design in an already-covered cell of the design space.
  bool extra = false;
};

nlohmann::json DesignDescriptorJson(const DesignDescriptor& d);

inline constexpr int kExpectedDesigns = 17;
inline constexpr int kExpectedSalaryDesigns = 9;
inline constexpr int kExpectedLocationDesigns = 8;

// Immutable set of designs loaded from a manifest. Load fails unless the
// manifest holds exactly 17 designs split 9 salary / 8 location, every
// (scenario, level, category) cell is covered or listed in "absent_cells",
// ids are unique, and each generator fits its category, scenario and level.
class DesignRegistry {
 public:
  static absl::StatusOr<DesignRegistry> FromManifest(const nlohmann::json& j);
  static absl::StatusOr<DesignRegistry> LoadFile(
      const std::filesystem::path& path);

  const std::vector<DesignDescriptor>& designs() const { return designs_; }
  const DesignDescriptor* Find(absl::string_view design_id) const;
  std::vector<DesignDescriptor> ForScenario(ScenarioKind scenario) const;
  std::vector<DesignDescriptor> ForCell(ScenarioKind scenario,
                                        DpLevel level) const;

  nlohmann::json ToJson() const;

 private:
  DesignRegistry() = default;

  std::vector<DesignDescriptor> designs_;
  std::vector<std::tuple<ScenarioKind, DpLevel, DesignCategory>> absent_;
};

}  // namespace dpconsent

#endif  // DPCONSENT_DESIGN_REGISTRY_H_
