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

#ifndef DPCONSENT_LOCAL_CLIENT_H_
#define DPCONSENT_LOCAL_CLIENT_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "dpconsent/concern.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/random.h"
#include "dpconsent/scenario.h"
#include "dpconsent/session.h"

namespace dpconsent {

// Device-side step of the pipeline. For LocalDP the raw value is perturbed
// here and only the result leaves the device; for CentralDP the raw value
// is passed through unflagged.
absl::StatusOr<DataSubmission> PrepareSubmission(const DataValue& raw,
                                                 const Scenario& scenario,
                                                 DpLevel level,
                                                 double local_epsilon,
                                                 Rng& rng);

absl::StatusOr<DataSubmission> PrepareSubmission(
    const DataValue& raw, const Scenario& scenario, DpLevel level,
    double local_epsilon, std::optional<uint64_t> seed);

}  // namespace dpconsent

#endif  // DPCONSENT_LOCAL_CLIENT_H_
