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

#include "dpconsent/budget_ledger.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpconsent {
namespace {

// Slack for sums like 0.1 * 10 that land a few ulps above the total.
constexpr double kRelativeSlack = 1e-12;

}  // namespace

absl::StatusOr<BudgetLedger> BudgetLedger::Create(double total_epsilon) {
  if (!std::isfinite(total_epsilon) || total_epsilon <= 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "total epsilon must be finite and > 0, got ", total_epsilon));
  }
  return BudgetLedger(total_epsilon);
}

BudgetLedger BudgetLedger::Unlimited() {
  return BudgetLedger(std::numeric_limits<double>::infinity());
}

BudgetLedger::BudgetLedger(const BudgetLedger& other) : total_(other.total_) {
  std::lock_guard<std::mutex> lock(other.mu_);
  entries_ = other.entries_;
  spent_ = other.spent_;
}

BudgetLedger& BudgetLedger::operator=(const BudgetLedger& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  total_ = other.total_;
  entries_ = other.entries_;
  spent_ = other.spent_;
  return *this;
}

absl::Status BudgetLedger::TryDebit(const std::string& query_id,
                                    double epsilon) {
  if (std::isnan(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot debit epsilon ", epsilon));
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (!std::isinf(total_) &&
      spent_ + epsilon > total_ * (1.0 + kRelativeSlack)) {
    return absl::FailedPreconditionError(
        absl::StrCat("budget exhausted: query '", query_id, "' needs epsilon ",
                     epsilon, " but only ", RemainingLocked(), " remains"));
  }
  entries_.push_back({query_id, epsilon});
  if (!std::isinf(total_)) spent_ += epsilon;
  return absl::OkStatus();
}

double BudgetLedger::RemainingLocked() const {
  if (std::isinf(total_)) return total_;
  return std::max(0.0, total_ - spent_);
}

double BudgetLedger::spent() const {
  std::lock_guard<std::mutex> lock(mu_);
  return spent_;
}

double BudgetLedger::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  return RemainingLocked();
}

std::vector<BudgetLedger::Entry> BudgetLedger::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

nlohmann::json BudgetLedger::ToJson() const {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json entries = nlohmann::json::array();
  for (const Entry& e : entries_) {
    entries.push_back({{"query_id", e.query_id}, {"epsilon", e.epsilon}});
  }
  auto num = [](double v) {
    return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v);
  };
  return {{"total_epsilon", num(total_)},
          {"remaining", num(RemainingLocked())},
          {"entries", entries}};
}

}  // namespace dpconsent
