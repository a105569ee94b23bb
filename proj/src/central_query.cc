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

#include "dpconsent/central_query.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {

absl::string_view QueryKindName(QueryKind kind) {
  switch (kind) {
    case QueryKind::kCount:
      return "count";
    case QueryKind::kMean:
      return "mean";
    case QueryKind::kHistogram:
      return "histogram";
  }
  return "unknown";
}

absl::StatusOr<QueryKind> ParseQueryKind(absl::string_view name) {
  if (name == "count") return QueryKind::kCount;
  if (name == "mean") return QueryKind::kMean;
  if (name == "histogram") return QueryKind::kHistogram;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown query kind '", name, "'"));
}

absl::StatusOr<HistogramBins> HistogramBins::ForDomain(
    const DataDomain& domain, int numeric_bins) {
  HistogramBins bins;
  if (const auto* num = std::get_if<NumericDomain>(&domain)) {
    if (numeric_bins < 1) {
      return absl::InvalidArgumentError("histogram needs at least one bin");
    }
    const double width = num->width() / numeric_bins;
    for (int i = 0; i <= numeric_bins; ++i) {
      bins.edges_.push_back(i == numeric_bins ? num->hi()
                                              : num->lo() + i * width);
    }
    for (int i = 0; i < numeric_bins; ++i) {
      bins.labels_.push_back(
          absl::StrCat(bins.edges_[i], "-", bins.edges_[i + 1]));
    }
    return bins;
  }
  const CellGrid& grid = std::get<CellGrid>(domain);
  bins.labels_ = grid.cells();
  bins.grid_ = grid;
  return bins;
}

int HistogramBins::BinOf(const DataValue& value) const {
  if (grid_.has_value()) {
    return grid_->IndexOf(std::get<std::string>(value)).value_or(0);
  }
  double x = std::get<double>(value);
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  int index = static_cast<int>(it - edges_.begin()) - 1;
  return std::clamp(index, 0, size() - 1);
}

namespace {

absl::Status ValidateRecord(const DataValue& record, const DataDomain& domain,
                            size_t row) {
  if (const auto* num = std::get_if<NumericDomain>(&domain)) {
    const double* x = std::get_if<double>(&record);
    if (x == nullptr || !std::isfinite(*x)) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", row, " is not a finite number"));
    }
    if (!num->Contains(*x)) {
      return absl::OutOfRangeError(absl::StrCat(
          "record ", row, " value ", *x, " outside [", num->lo(), ", ",
          num->hi(), "]"));
    }
    return absl::OkStatus();
  }
  const auto* cell = std::get_if<std::string>(&record);
  if (cell == nullptr ||
      !std::get<CellGrid>(domain).IndexOf(*cell).has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("record ", row, " is not a known cell"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<int64_t>> TrueHistogram(
    std::span<const DataValue> dataset, const HistogramBins& bins,
    const DataDomain& domain) {
  std::vector<int64_t> counts(bins.size(), 0);
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (absl::Status s = ValidateRecord(dataset[i], domain, i); !s.ok()) {
      return s;
    }
    ++counts[bins.BinOf(dataset[i])];
  }
  return counts;
}

nlohmann::json CentralAnswerJson(const CentralAnswer& a) {
  nlohmann::json j = {{"query_id", a.query_id},
                      {"query", QueryKindName(a.kind)},
                      {"values", a.values},
                      {"epsilon", std::isinf(a.epsilon)
                                      ? nlohmann::json("inf")
                                      : nlohmann::json(a.epsilon)},
                      {"noise_scale", a.noise_scale}};
  if (!a.bin_labels.empty()) j["bins"] = a.bin_labels;
  j["seed"] = a.seed.has_value() ? nlohmann::json(*a.seed) : nullptr;
  return j;
}

absl::StatusOr<CentralAnswer> CentralAnswerQuery(
    std::span<const DataValue> dataset, QueryKind kind,
    const MechanismParams& params, BudgetLedger& ledger, Rng& rng,
    const CentralQueryOptions& options) {
  if (!params.limit_mode() && params.epsilon() == 0) {
    return absl::InvalidArgumentError("central queries require epsilon > 0");
  }
  const DataDomain& domain = params.domain();
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (absl::Status s = ValidateRecord(dataset[i], domain, i); !s.ok()) {
      return s;
    }
  }

  CentralAnswer answer;
  answer.query_id = options.query_id.empty()
                        ? absl::StrCat(QueryKindName(kind), "-",
                                       ledger.entries().size() + 1)
                        : options.query_id;
  answer.kind = kind;
  answer.epsilon = params.epsilon();

  // True values first; nothing below this block can fail after the debit.
  std::vector<double> truth;
  double sensitivity = 1.0;
  switch (kind) {
    case QueryKind::kCount:
      truth.push_back(static_cast<double>(dataset.size()));
      break;
    case QueryKind::kMean: {
      const auto* num = std::get_if<NumericDomain>(&domain);
      if (num == nullptr) {
        return absl::InvalidArgumentError(
            "undefined query: mean over categorical cells");
      }
      if (dataset.empty()) {
        return absl::InvalidArgumentError(
            "undefined query: mean of an empty dataset");
      }
      double sum = 0;
      for (const DataValue& v : dataset) sum += std::get<double>(v);
      truth.push_back(sum / static_cast<double>(dataset.size()));
      sensitivity = num->width() / static_cast<double>(dataset.size());
      break;
    }
    case QueryKind::kHistogram: {
      absl::StatusOr<HistogramBins> bins =
          HistogramBins::ForDomain(domain, options.numeric_bins);
      if (!bins.ok()) return bins.status();
      absl::StatusOr<std::vector<int64_t>> counts =
          TrueHistogram(dataset, *bins, domain);
      if (!counts.ok()) return counts.status();
      for (int64_t c : *counts) truth.push_back(static_cast<double>(c));
      answer.bin_labels = bins->labels();
      break;
    }
  }

  if (absl::Status s = ledger.TryDebit(answer.query_id, params.epsilon());
      !s.ok()) {
    return s;
  }

  answer.noise_scale =
      params.limit_mode() ? 0.0 : sensitivity / params.epsilon();
  answer.values.reserve(truth.size());
  for (double t : truth) {
    answer.values.push_back(t + SampleLaplace(answer.noise_scale, rng));
  }
  return answer;
}

}  // namespace dpconsent
