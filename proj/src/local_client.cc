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

#include "dpconsent/local_client.h"

namespace dpconsent {

absl::StatusOr<DataSubmission> PrepareSubmission(const DataValue& raw,
                                                 const Scenario& scenario,
                                                 DpLevel level,
                                                 double local_epsilon,
                                                 Rng& rng) {
  if (level == DpLevel::kCentral) {
    return DataSubmission{raw, /*perturbed=*/false, ""};
  }
  absl::StatusOr<MechanismParams> params =
      MechanismParams::ForLocal(scenario, local_epsilon);
  if (!params.ok()) return params.status();
  absl::StatusOr<NoiseSample> sample = LocalPerturb(raw, *params, rng);
  if (!sample.ok()) return sample.status();
  return DataSubmission{sample->output_value, /*perturbed=*/true,
                        sample->mechanism_id};
}

absl::StatusOr<DataSubmission> PrepareSubmission(
    const DataValue& raw, const Scenario& scenario, DpLevel level,
    double local_epsilon, std::optional<uint64_t> seed) {
  Rng rng = Rng::FromOptionalSeed(seed);
  return PrepareSubmission(raw, scenario, level, local_epsilon, rng);
}

}  // namespace dpconsent
