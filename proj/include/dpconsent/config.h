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

#ifndef DPCONSENT_CONFIG_H_
#define DPCONSENT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

// Directory holding templates/ and designs.json. Overridable at runtime
// through --data-dir or the "data_dir" config key.
std::filesystem::path DefaultDataDir();

// Service and CLI configuration. Every key is optional in the file; missing
// keys keep the defaults below.
struct ServiceConfig {
  double local_epsilon = 1.0;
  double central_epsilon = 1.0;
  // Total epsilon the protected store may spend across central queries.
  double total_budget = 10.0;
  double salary_lo = 0.0;
  double salary_hi = 1'000'000.0;
  std::string salary_units = "currency/year";
  std::vector<std::string> grid_cells = {"C1", "C2", "C3", "C4", "C5",
                                         "C6", "C7", "C8", "C9"};
  int trial_count = 5;
  int ball_count = 20;
  int histogram_bins = 10;
  double example_salary = 50'000.0;
  std::string example_cell = "C5";
  // Synthetic records behind the central-DP illustrations.
  int illustration_dataset_size = 1000;
  uint64_t illustration_seed = 7;
  // Empty -> in-memory service with no persistence.
  std::string storage_path;
  int snapshot_every = 256;
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::string operator_token;
  std::string data_dir;
  // Fixed seed for the service's payload generator; unset -> OS entropy.
  std::optional<uint64_t> seed;

  absl::StatusOr<Scenario> SalaryScenario() const;
  absl::StatusOr<Scenario> LocationScenario() const;
  absl::StatusOr<Scenario> ScenarioFor(ScenarioKind kind) const;
  std::filesystem::path ResolvedDataDir() const;

  absl::Status Validate() const;
};

absl::StatusOr<ServiceConfig> ConfigFromJson(const nlohmann::json& j);
absl::StatusOr<ServiceConfig> LoadConfigFile(
    const std::filesystem::path& path);
nlohmann::json ConfigJson(const ServiceConfig& c);

}  // namespace dpconsent

#endif  // DPCONSENT_CONFIG_H_
