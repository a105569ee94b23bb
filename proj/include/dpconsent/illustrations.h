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

// Data payloads for illustration designs. Payloads never carry rendering
// geometry; the UI decides colors and layout.

#ifndef DPCONSENT_ILLUSTRATIONS_H_
#define DPCONSENT_ILLUSTRATIONS_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpconsent/budget_ledger.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

inline constexpr int kDefaultTrialCount = 5;
inline constexpr int kDefaultBallCount = 20;

// Repeated perturbation of one example input.
struct TrialsPayload {
  DataValue example_input;
  std::vector<DataValue> outputs;
  std::string mechanism_id;
  uint64_t seed;
  double epsilon;
  DataDomain domain;
  // Numeric outputs that fell outside the clamp interval. They are kept and
  // shown, never clamped.
  int out_of_range_count = 0;
};

absl::StatusOr<TrialsPayload> GenerateRepeatedTrials(
    const DataValue& input, const Scenario& scenario,
    const MechanismParams& params, int n, uint64_t seed);

// True vs noisy histogram of one dataset.
struct DistributionPayload {
  std::vector<std::string> bins;
  // Bin edges for numeric data, empty for cells.
  std::vector<double> edges;
  std::vector<int64_t> true_counts;
  std::vector<double> noisy_counts;
  double epsilon;
  double noise_scale;
  uint64_t seed;
};

// Noisy counts come from the central histogram query, so the ledger is
// debited by params.epsilon.
absl::StatusOr<DistributionPayload> GenerateDistribution(
    std::span<const DataValue> dataset, const Scenario& scenario,
    const MechanismParams& params, BudgetLedger& ledger, uint64_t seed,
    int numeric_bins);

// Quantile dotplot: ball i sits at the ((i - 0.5) / n)-quantile of a
// Laplace(center, scale) output law, i = 1..n.
struct DotplotPayload {
  std::vector<double> ball_positions;
  double reference_value;
  int n;
  double center;
  double scale;
};

absl::StatusOr<DotplotPayload> GenerateDotplot(double center, double scale,
                                               int n_balls,
                                               double reference_value);
// Local-DP dotplot for a numeric example input: center = input, scale =
// sensitivity / epsilon.
absl::StatusOr<DotplotPayload> GenerateDotplot(double input,
                                               const Scenario& scenario,
                                               const MechanismParams& params,
                                               int n_balls);

enum class CellPresentation { kTable, kPie, kMap };

absl::string_view CellPresentationName(CellPresentation p);
absl::StatusOr<CellPresentation> ParseCellPresentation(absl::string_view name);

// Exact randomized-response output distribution for one true cell.
struct CellProbPayload {
  std::string true_cell;
  std::vector<std::pair<std::string, double>> cells;
  CellPresentation presentation;
  double epsilon;
};

absl::StatusOr<CellProbPayload> GenerateCellProbs(
    absl::string_view true_cell, const MechanismParams& params,
    CellPresentation presentation);

nlohmann::json TrialsJson(const TrialsPayload& p);
nlohmann::json DistributionJson(const DistributionPayload& p);
nlohmann::json DotplotJson(const DotplotPayload& p);
nlohmann::json CellProbsJson(const CellProbPayload& p);

}  // namespace dpconsent

#endif  // DPCONSENT_ILLUSTRATIONS_H_
