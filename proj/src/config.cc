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

#include "dpconsent/config.h"

#include <cmath>
#include <fstream>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

#ifndef DPCONSENT_DATA_DIR
#define DPCONSENT_DATA_DIR "data"
#endif

namespace dpconsent {
namespace {

const std::set<std::string>& KnownKeys() {
  static const auto* keys = new std::set<std::string>{
      "epsilon",        "total_budget",
      "salary_clamp",   "grid_cells",
      "trial_count",    "ball_count",
      "histogram_bins", "example_salary",
      "example_cell",   "illustration_dataset_size",
      "illustration_seed", "storage_path",
      "snapshot_every", "bind_address",
      "port",           "operator_token",
      "data_dir",       "seed",
  };
  return *keys;
}

template <typename T>
absl::Status Read(const nlohmann::json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': ", e.what()));
  }
  return absl::OkStatus();
}

}  // namespace

std::filesystem::path DefaultDataDir() { return DPCONSENT_DATA_DIR; }

absl::StatusOr<Scenario> ServiceConfig::SalaryScenario() const {
  absl::StatusOr<NumericDomain> d =
      NumericDomain::Create(salary_lo, salary_hi, salary_units);
  if (!d.ok()) return d.status();
  return Scenario::Salary(std::move(*d));
}

absl::StatusOr<Scenario> ServiceConfig::LocationScenario() const {
  absl::StatusOr<CellGrid> g = CellGrid::Create(grid_cells);
  if (!g.ok()) return g.status();
  return Scenario::Location(std::move(*g));
}

absl::StatusOr<Scenario> ServiceConfig::ScenarioFor(ScenarioKind kind) const {
  return kind == ScenarioKind::kSalaryNumeric ? SalaryScenario()
                                              : LocationScenario();
}

std::filesystem::path ServiceConfig::ResolvedDataDir() const {
  return data_dir.empty() ? DefaultDataDir() : std::filesystem::path(data_dir);
}

absl::Status ServiceConfig::Validate() const {
  for (double eps : {local_epsilon, central_epsilon}) {
    if (!std::isfinite(eps) || eps <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon must be finite and > 0, got ", eps));
    }
  }
  if (!std::isfinite(total_budget) || total_budget <= 0) {
    return absl::InvalidArgumentError("total_budget must be finite and > 0");
  }
  absl::StatusOr<Scenario> salary = SalaryScenario();
  if (!salary.ok()) return salary.status();
  absl::StatusOr<Scenario> location = LocationScenario();
  if (!location.ok()) return location.status();
  if (!salary->numeric().Contains(example_salary)) {
    return absl::InvalidArgumentError("example_salary outside salary_clamp");
  }
  if (!location->grid().IndexOf(example_cell).has_value()) {
    return absl::InvalidArgumentError("example_cell is not a grid cell");
  }
  if (trial_count < 1) return absl::InvalidArgumentError("trial_count < 1");
  if (ball_count < 2) return absl::InvalidArgumentError("ball_count < 2");
  if (histogram_bins < 1) {
    return absl::InvalidArgumentError("histogram_bins < 1");
  }
  if (illustration_dataset_size < 1) {
    return absl::InvalidArgumentError("illustration_dataset_size < 1");
  }
  if (snapshot_every < 1) {
    return absl::InvalidArgumentError("snapshot_every < 1");
  }
  if (port < 0 || port > 65535) return absl::InvalidArgumentError("bad port");
  return absl::OkStatus();
}

absl::StatusOr<ServiceConfig> ConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  for (const auto& [key, unused] : j.items()) {
    if (!KnownKeys().contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  ServiceConfig c;
  if (auto it = j.find("epsilon"); it != j.end()) {
    if (!it->is_object()) {
      return absl::InvalidArgumentError("'epsilon' must be an object");
    }
    if (absl::Status s = Read(*it, "local", c.local_epsilon); !s.ok()) return s;
    if (absl::Status s = Read(*it, "central", c.central_epsilon); !s.ok()) {
      return s;
    }
  }
  if (auto it = j.find("salary_clamp"); it != j.end()) {
    if (!it->is_object()) {
      return absl::InvalidArgumentError("'salary_clamp' must be an object");
    }
    if (absl::Status s = Read(*it, "lo", c.salary_lo); !s.ok()) return s;
    if (absl::Status s = Read(*it, "hi", c.salary_hi); !s.ok()) return s;
    if (absl::Status s = Read(*it, "units", c.salary_units); !s.ok()) return s;
  }
  std::optional<uint64_t> seed;
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned() &&
        !(it->is_number_integer() && it->get<int64_t>() >= 0)) {
      return absl::InvalidArgumentError("'seed' must be a non-negative int");
    }
    seed = it->get<uint64_t>();
  }
  c.seed = seed;
  for (absl::Status s : {
           Read(j, "total_budget", c.total_budget),
           Read(j, "grid_cells", c.grid_cells),
           Read(j, "trial_count", c.trial_count),
           Read(j, "ball_count", c.ball_count),
           Read(j, "histogram_bins", c.histogram_bins),
           Read(j, "example_salary", c.example_salary),
           Read(j, "example_cell", c.example_cell),
           Read(j, "illustration_dataset_size", c.illustration_dataset_size),
           Read(j, "illustration_seed", c.illustration_seed),
           Read(j, "storage_path", c.storage_path),
           Read(j, "snapshot_every", c.snapshot_every),
           Read(j, "bind_address", c.bind_address),
           Read(j, "port", c.port),
           Read(j, "operator_token", c.operator_token),
           Read(j, "data_dir", c.data_dir),
       }) {
    if (!s.ok()) return s;
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

absl::StatusOr<ServiceConfig> LoadConfigFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open config file ", path.string()));
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.string(), " is not valid JSON"));
  }
  return ConfigFromJson(j);
}

nlohmann::json ConfigJson(const ServiceConfig& c) {
  nlohmann::json j = {
      {"epsilon", {{"local", c.local_epsilon}, {"central", c.central_epsilon}}},
      {"total_budget", c.total_budget},
      {"salary_clamp",
       {{"lo", c.salary_lo}, {"hi", c.salary_hi}, {"units", c.salary_units}}},
      {"grid_cells", c.grid_cells},
      {"trial_count", c.trial_count},
      {"ball_count", c.ball_count},
      {"histogram_bins", c.histogram_bins},
      {"example_salary", c.example_salary},
      {"example_cell", c.example_cell},
      {"illustration_dataset_size", c.illustration_dataset_size},
      {"illustration_seed", c.illustration_seed},
      {"storage_path", c.storage_path},
      {"snapshot_every", c.snapshot_every},
      {"bind_address", c.bind_address},
      {"port", c.port},
      {"data_dir", c.data_dir},
  };
  // The operator token is never echoed.
  j["seed"] = c.seed.has_value() ? nlohmann::json(*c.seed) : nullptr;
  return j;
}

}  // namespace dpconsent
