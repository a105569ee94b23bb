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

#ifndef DPCONSENT_MECHANISMS_H_
#define DPCONSENT_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpconsent/random.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

inline constexpr absl::string_view kLaplaceMechanismId = "laplace";
inline constexpr absl::string_view kRandomizedResponseId = "k_rr";

// A salary amount or a cell name.
using DataValue = std::variant<double, std::string>;

nlohmann::json DataValueJson(const DataValue& v);
absl::StatusOr<DataValue> DataValueFromJson(const nlohmann::json& j);

// Parameters of one mechanism instance.
//
// epsilon must be finite and >= 0. epsilon = +inf is accepted only through
// NoPrivacyLimit(), which exists for tests and limit-case illustrations and
// marks the params so callers can refuse them in production paths.
// epsilon = 0 is legal for randomized response (uniform output) but is
// rejected by every additive-noise mechanism.
class MechanismParams {
 public:
  static absl::StatusOr<MechanismParams> Create(double epsilon,
                                                double sensitivity,
                                                DataDomain domain);
  // Local-DP params for a scenario: sensitivity is hi - lo of the clamp
  // interval for numeric data, 1 for cells.
  static absl::StatusOr<MechanismParams> ForLocal(const Scenario& scenario,
                                                  double epsilon);
  static MechanismParams NoPrivacyLimit(double sensitivity, DataDomain domain);

  double epsilon() const { return epsilon_; }
  double sensitivity() const { return sensitivity_; }
  const DataDomain& domain() const { return domain_; }
  bool limit_mode() const { return limit_mode_; }

  // sensitivity / epsilon; 0 in limit mode.
  double laplace_scale() const;

  // Same data domain and mode, different budget or sensitivity.
  absl::StatusOr<MechanismParams> WithEpsilon(double epsilon) const;
  absl::StatusOr<MechanismParams> WithSensitivity(double sensitivity) const;

 private:
  MechanismParams(double epsilon, double sensitivity, DataDomain domain,
                  bool limit_mode)
      : epsilon_(epsilon),
        sensitivity_(sensitivity),
        domain_(std::move(domain)),
        limit_mode_(limit_mode) {}

  double epsilon_;
  double sensitivity_;
  DataDomain domain_;
  bool limit_mode_;
};

struct NoiseSample {
  DataValue input_value;
  DataValue output_value;
  std::string mechanism_id;
  std::optional<uint64_t> seed;
};

nlohmann::json NoiseSampleJson(const NoiseSample& s);

// Zero-centred double-exponential law with scale b.
double LaplaceCdf(double x, double center, double scale);
double LaplaceQuantile(double q, double center, double scale);
double SampleLaplace(double scale, Rng& rng);

// x + Laplace(sensitivity / epsilon). x must lie inside the numeric clamp
// interval; the output is not clamped back into it.
absl::StatusOr<NoiseSample> LaplacePerturb(double x,
                                           const MechanismParams& params,
                                           Rng& rng);
absl::StatusOr<NoiseSample> LaplacePerturb(double x,
                                           const MechanismParams& params,
                                           std::optional<uint64_t> seed);

// k-ary randomized response over the params' cell grid.
double RrKeepProbability(int k, double epsilon);
double RrOtherProbability(int k, double epsilon);
// Output distribution over all k cells given the true cell index.
std::vector<double> RrTransitionRow(int k, double epsilon, int true_index);

absl::StatusOr<NoiseSample> RrPerturb(absl::string_view cell,
                                      const MechanismParams& params, Rng& rng);
absl::StatusOr<NoiseSample> RrPerturb(absl::string_view cell,
                                      const MechanismParams& params,
                                      std::optional<uint64_t> seed);
// Index-level draw without validation, for hot loops.
int RrPerturbIndex(int true_index, int k, double epsilon, Rng& rng);

// Dispatches on the params' domain: Laplace for numeric, RR for cells.
absl::StatusOr<NoiseSample> LocalPerturb(const DataValue& value,
                                         const MechanismParams& params,
                                         Rng& rng);

}  // namespace dpconsent

#endif  // DPCONSENT_MECHANISMS_H_
