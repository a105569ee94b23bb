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

#ifndef DPCONSENT_BUDGET_LEDGER_H_
#define DPCONSENT_BUDGET_LEDGER_H_

#include <mutex>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace dpconsent {

// Sequential-composition privacy budget. Debits are linearizable: each
// TryDebit either appends one entry or leaves the ledger untouched, and
// remaining() never goes below zero.
class BudgetLedger {
 public:
  struct Entry {
    std::string query_id;
    double epsilon;
  };

  static absl::StatusOr<BudgetLedger> Create(double total_epsilon);
  // Infinite total; every debit succeeds. For no-privacy limit tests.
  static BudgetLedger Unlimited();

  BudgetLedger(const BudgetLedger& other);
  BudgetLedger& operator=(const BudgetLedger& other);

  // FailedPrecondition ("budget exhausted") when epsilon exceeds what is
  // left; InvalidArgument for negative or NaN epsilon.
  absl::Status TryDebit(const std::string& query_id, double epsilon);

  double total_epsilon() const { return total_; }
  double spent() const;
  double remaining() const;
  std::vector<Entry> entries() const;

  nlohmann::json ToJson() const;

 private:
  explicit BudgetLedger(double total) : total_(total) {}

  double RemainingLocked() const;

  double total_;
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
  double spent_ = 0.0;
};

}  // namespace dpconsent

#endif  // DPCONSENT_BUDGET_LEDGER_H_
