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

#include "dpconsent/illustrations.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpconsent/central_query.h"

namespace dpconsent {
namespace {

nlohmann::json EpsilonJson(double eps) {
  return std::isinf(eps) ? nlohmann::json("inf") : nlohmann::json(eps);
}

}  // namespace

absl::StatusOr<TrialsPayload> GenerateRepeatedTrials(
    const DataValue& input, const Scenario& scenario,
    const MechanismParams& params, int n, uint64_t seed) {
  if (n < 1) {
    return absl::InvalidArgumentError("trial count must be at least 1");
  }
  if (scenario.domain().index() != params.domain().index()) {
    return absl::InvalidArgumentError(
        "mechanism params do not match the scenario's data domain");
  }
  TrialsPayload p{input, {}, "", seed, params.epsilon(), params.domain(), 0};
  Rng rng(seed);
  p.outputs.reserve(n);
  for (int i = 0; i < n; ++i) {
    absl::StatusOr<NoiseSample> s = LocalPerturb(input, params, rng);
    if (!s.ok()) return s.status();
    p.mechanism_id = s->mechanism_id;
    if (const double* x = std::get_if<double>(&s->output_value)) {
      if (!scenario.numeric().Contains(*x)) ++p.out_of_range_count;
    }
    p.outputs.push_back(std::move(s->output_value));
  }
  return p;
}

absl::StatusOr<DistributionPayload> GenerateDistribution(
    std::span<const DataValue> dataset, const Scenario& scenario,
    const MechanismParams& params, BudgetLedger& ledger, uint64_t seed,
    int numeric_bins) {
  if (dataset.empty()) {
    return absl::InvalidArgumentError(
        "distribution illustration needs a non-empty dataset");
  }
  if (scenario.domain().index() != params.domain().index()) {
    return absl::InvalidArgumentError(
        "mechanism params do not match the scenario's data domain");
  }
  absl::StatusOr<HistogramBins> bins =
      HistogramBins::ForDomain(params.domain(), numeric_bins);
  if (!bins.ok()) return bins.status();
  absl::StatusOr<std::vector<int64_t>> truth =
      TrueHistogram(dataset, *bins, params.domain());
  if (!truth.ok()) return truth.status();

  Rng rng(seed);
  CentralQueryOptions options;
  options.numeric_bins = numeric_bins;
  options.query_id = absl::StrCat("illustration-histogram-", seed);
  absl::StatusOr<CentralAnswer> answer = CentralAnswerQuery(
      dataset, QueryKind::kHistogram, params, ledger, rng, options);
  if (!answer.ok()) return answer.status();

  return DistributionPayload{bins->labels(), bins->edges(),
                             std::move(*truth), std::move(answer->values),
                             params.epsilon(), answer->noise_scale, seed};
}

absl::StatusOr<DotplotPayload> GenerateDotplot(double center, double scale,
                                               int n_balls,
                                               double reference_value) {
  if (n_balls < 2) {
    return absl::InvalidArgumentError("dotplot needs at least 2 balls");
  }
  if (!std::isfinite(center) || !std::isfinite(scale) || scale < 0) {
    return absl::InvalidArgumentError("dotplot needs finite center and scale");
  }
  DotplotPayload p{{}, reference_value, n_balls, center, scale};
  p.ball_positions.reserve(n_balls);
  for (int i = 1; i <= n_balls; ++i) {
    const double q = (i - 0.5) / n_balls;
    p.ball_positions.push_back(LaplaceQuantile(q, center, scale));
  }
  return p;
}

absl::StatusOr<DotplotPayload> GenerateDotplot(double input,
                                               const Scenario& scenario,
                                               const MechanismParams& params,
                                               int n_balls) {
  if (scenario.kind() != ScenarioKind::kSalaryNumeric) {
    return absl::InvalidArgumentError("dotplot needs a numeric scenario");
  }
  if (!scenario.numeric().Contains(input)) {
    return absl::OutOfRangeError(
        absl::StrCat("clamp violation: ", input, " outside the domain"));
  }
  return GenerateDotplot(input, params.laplace_scale(), n_balls, input);
}

absl::string_view CellPresentationName(CellPresentation p) {
  switch (p) {
    case CellPresentation::kTable:
      return "table";
    case CellPresentation::kPie:
      return "pie";
    case CellPresentation::kMap:
      return "map";
  }
  return "table";
}

absl::StatusOr<CellPresentation> ParseCellPresentation(absl::string_view name) {
  if (name == "table") return CellPresentation::kTable;
  if (name == "pie") return CellPresentation::kPie;
  if (name == "map") return CellPresentation::kMap;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown presentation '", name, "'"));
}

absl::StatusOr<CellProbPayload> GenerateCellProbs(
    absl::string_view true_cell, const MechanismParams& params,
    CellPresentation presentation) {
  const auto* grid = std::get_if<CellGrid>(&params.domain());
  if (grid == nullptr) {
    return absl::InvalidArgumentError(
        "cell probabilities need a location cell grid");
  }
  std::optional<int> index = grid->IndexOf(true_cell);
  if (!index.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed input: unknown cell '", true_cell, "'"));
  }
  std::vector<double> row =
      RrTransitionRow(grid->size(), params.epsilon(), *index);
  CellProbPayload p{std::string(true_cell), {}, presentation,
                    params.epsilon()};
  for (int i = 0; i < grid->size(); ++i) {
    p.cells.emplace_back(grid->name(i), row[i]);
  }
  return p;
}

nlohmann::json TrialsJson(const TrialsPayload& p) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const DataValue& v : p.outputs) outputs.push_back(DataValueJson(v));
  return {{"type", "trials"},
          {"schema_version", 1},
          {"example_input", DataValueJson(p.example_input)},
          {"outputs", outputs},
          {"mechanism_id", p.mechanism_id},
          {"seed", p.seed},
          {"epsilon", EpsilonJson(p.epsilon)},
          {"domain", DomainJson(p.domain)},
          {"out_of_range_count", p.out_of_range_count}};
}

nlohmann::json DistributionJson(const DistributionPayload& p) {
  return {{"type", "distribution"},
          {"schema_version", 1},
          {"bins", p.bins},
          {"edges", p.edges},
          {"true_counts", p.true_counts},
          {"noisy_counts", p.noisy_counts},
          {"epsilon", EpsilonJson(p.epsilon)},
          {"noise_scale", p.noise_scale},
          {"seed", p.seed}};
}

nlohmann::json DotplotJson(const DotplotPayload& p) {
  return {{"type", "dotplot"},
          {"schema_version", 1},
          {"ball_positions", p.ball_positions},
          {"reference_value", p.reference_value},
          {"n", p.n},
          {"center", p.center},
          {"scale", p.scale}};
}

nlohmann::json CellProbsJson(const CellProbPayload& p) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [cell, prob] : p.cells) {
    cells.push_back({{"cell", cell}, {"probability", prob}});
  }
  return {{"type", "cell_probs"},
          {"schema_version", 1},
          {"true_cell", p.true_cell},
          {"cells", cells},
          {"presentation", CellPresentationName(p.presentation)},
          {"epsilon", EpsilonJson(p.epsilon)}};
}

}  // namespace dpconsent
