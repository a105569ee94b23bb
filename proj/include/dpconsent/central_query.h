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

#ifndef DPCONSENT_CENTRAL_QUERY_H_
#define DPCONSENT_CENTRAL_QUERY_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpconsent/budget_ledger.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/random.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

enum class QueryKind { kCount, kMean, kHistogram };

absl::string_view QueryKindName(QueryKind kind);
absl::StatusOr<QueryKind> ParseQueryKind(absl::string_view name);

// Histogram bins over a data domain. Numeric domains are split into equal
// width bins whose edges start at lo and end exactly at hi (the last bin is
// closed on the right); cell grids get one bin per cell.
class HistogramBins {
 public:
  static absl::StatusOr<HistogramBins> ForDomain(const DataDomain& domain,
                                                 int numeric_bins);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  // size() + 1 entries for numeric domains, empty for cells.
  const std::vector<double>& edges() const { return edges_; }

  // Caller guarantees the value is inside the domain.
  int BinOf(const DataValue& value) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> edges_;
  std::optional<CellGrid> grid_;
};

struct CentralAnswer {
  std::string query_id;
  QueryKind kind;
  // One entry for count/mean, one per bin for histogram.
  std::vector<double> values;
  std::vector<std::string> bin_labels;
  double epsilon;
  double noise_scale;
  std::optional<uint64_t> seed;
};

nlohmann::json CentralAnswerJson(const CentralAnswer& a);

struct CentralQueryOptions {
  std::string query_id;
  int numeric_bins = 10;
};

// Answers one aggregate query with Laplace noise and debits the ledger by
// params.epsilon. Count and histogram use per-number scale 1/epsilon; mean
// uses the clamped-sum sensitivity (hi - lo) / n. Inputs are validated
// before the ledger is touched, so every rejected query leaves it
// unchanged.
absl::StatusOr<CentralAnswer> CentralAnswerQuery(
    std::span<const DataValue> dataset, QueryKind kind,
    const MechanismParams& params, BudgetLedger& ledger, Rng& rng,
    const CentralQueryOptions& options = {});

// True (noise-free) histogram counts; used by illustrations and oracles.
absl::StatusOr<std::vector<int64_t>> TrueHistogram(
    std::span<const DataValue> dataset, const HistogramBins& bins,
    const DataDomain& domain);

}  // namespace dpconsent

#endif  // DPCONSENT_CENTRAL_QUERY_H_
