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

#include "dpconsent/scenario.h"

#include <cmath>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {

absl::string_view ScenarioName(ScenarioKind kind) {
  return kind == ScenarioKind::kSalaryNumeric ? "SalaryNumeric"
                                              : "LocationGeo";
}

absl::StatusOr<ScenarioKind> ParseScenario(absl::string_view name) {
  if (name == "SalaryNumeric") return ScenarioKind::kSalaryNumeric;
  if (name == "LocationGeo") return ScenarioKind::kLocationGeo;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown scenario '", name, "'"));
}

absl::StatusOr<NumericDomain> NumericDomain::Create(double lo, double hi,
                                                    std::string units) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("numeric domain requires finite lo < hi, got [", lo, ", ",
                     hi, "]"));
  }
  return NumericDomain(lo, hi, std::move(units));
}

absl::StatusOr<CellGrid> CellGrid::Create(std::vector<std::string> cells) {
  if (cells.size() < 2) {
    return absl::InvalidArgumentError("cell grid requires at least 2 cells");
  }
  std::set<absl::string_view> seen;
  for (const std::string& c : cells) {
    if (c.empty()) return absl::InvalidArgumentError("empty cell name");
    if (!seen.insert(c).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate cell name '", c, "'"));
    }
  }
  return CellGrid(std::move(cells));
}

CellGrid CellGrid::Numbered(int k) {
  std::vector<std::string> cells;
  for (int i = 1; i <= k; ++i) cells.push_back(absl::StrCat("C", i));
  return CellGrid(std::move(cells));
}

std::optional<int> CellGrid::IndexOf(absl::string_view cell) const {
  for (size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == cell) return static_cast<int>(i);
  }
  return std::nullopt;
}

nlohmann::json DomainJson(const DataDomain& domain) {
  if (const auto* num = std::get_if<NumericDomain>(&domain)) {
    return {{"type", "numeric"},
            {"lo", num->lo()},
            {"hi", num->hi()},
            {"units", num->units()}};
  }
  return {{"type", "cells"}, {"cells", std::get<CellGrid>(domain).cells()}};
}

}  // namespace dpconsent
