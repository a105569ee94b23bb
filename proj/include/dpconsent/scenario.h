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

#ifndef DPCONSENT_SCENARIO_H_
#define DPCONSENT_SCENARIO_H_

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace dpconsent {

enum class ScenarioKind : uint8_t {
  kSalaryNumeric,
  kLocationGeo,
};

inline constexpr ScenarioKind kAllScenarios[] = {ScenarioKind::kSalaryNumeric,
                                                 ScenarioKind::kLocationGeo};

absl::string_view ScenarioName(ScenarioKind kind);
absl::StatusOr<ScenarioKind> ParseScenario(absl::string_view name);

// Closed interval [lo, hi] with lo < hi.
class NumericDomain {
 public:
  static absl::StatusOr<NumericDomain> Create(double lo, double hi,
                                              std::string units);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  const std::string& units() const { return units_; }
  bool Contains(double x) const { return x >= lo_ && x <= hi_; }

 private:
  NumericDomain(double lo, double hi, std::string units)
      : lo_(lo), hi_(hi), units_(std::move(units)) {}

  double lo_;
  double hi_;
  std::string units_;
};

// Finite grid of k >= 2 uniquely named cells.
class CellGrid {
 public:
  static absl::StatusOr<CellGrid> Create(std::vector<std::string> cells);
  // "C1".."Ck".
  static CellGrid Numbered(int k);

  int size() const { return static_cast<int>(cells_.size()); }
  const std::vector<std::string>& cells() const { return cells_; }
  const std::string& name(int index) const { return cells_[index]; }
  std::optional<int> IndexOf(absl::string_view cell) const;

 private:
  explicit CellGrid(std::vector<std::string> cells)
      : cells_(std::move(cells)) {}

  std::vector<std::string> cells_;
};

using DataDomain = std::variant<NumericDomain, CellGrid>;

class Scenario {
 public:
  static Scenario Salary(NumericDomain domain) {
    return Scenario(ScenarioKind::kSalaryNumeric, std::move(domain));
  }
  static Scenario Location(CellGrid grid) {
    return Scenario(ScenarioKind::kLocationGeo, std::move(grid));
  }

  ScenarioKind kind() const { return kind_; }
  const DataDomain& domain() const { return domain_; }
  // Only valid for the matching kind.
  const NumericDomain& numeric() const {
    return std::get<NumericDomain>(domain_);
  }
  const CellGrid& grid() const { return std::get<CellGrid>(domain_); }

 private:
  Scenario(ScenarioKind kind, DataDomain domain)
      : kind_(kind), domain_(std::move(domain)) {}

  ScenarioKind kind_;
  DataDomain domain_;
};

nlohmann::json DomainJson(const DataDomain& domain);

}  // namespace dpconsent

#endif  // DPCONSENT_SCENARIO_H_
