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

#ifndef DPCONSENT_DP_VERIFIER_H_
#define DPCONSENT_DP_VERIFIER_H_

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/random.h"
#include "json.hpp"

namespace dpconsent {

// Mechanism with finite input and output sets given by its exact output
// probabilities: probabilities[x][o] = P[M(x) = o].
struct TransitionMatrix {
  std::string name;
  std::vector<std::vector<double>> probabilities;
};

absl::StatusOr<TransitionMatrix> RandomizedResponseMatrix(int k,
                                                          double epsilon);
// Deterministic output = input over k values.
TransitionMatrix IdentityMatrix(int k);

// Additive Laplace noise of scale sensitivity / epsilon; checked
// analytically through the density-ratio bound.
struct LaplaceHandle {
  double sensitivity;
  double epsilon;
};

// Opaque sampler. Cannot be enumerated, so verification refuses it.
struct SamplerHandle {
  std::string name;
  std::function<DataValue(const DataValue&, Rng&)> sample;
};

using MechanismHandle =
    std::variant<TransitionMatrix, LaplaceHandle, SamplerHandle>;

struct DpWitness {
  int input;
  int neighbour_input;
  int output;
};

struct VerificationReport {
  enum class Method { kEnumeration, kAnalytic };

  std::string mechanism;
  Method method;
  double epsilon;
  // e^epsilon.
  double bound;
  // max over (x, x', o) of P[M(x)=o] / P[M(x')=o]; +inf when some output is
  // possible from one input and impossible from another.
  double worst_ratio;
  bool holds;
  // Set for enumeration reports that hit the worst ratio.
  std::optional<DpWitness> witness;
};

nlohmann::json VerificationReportJson(const VerificationReport& r);

// Checks P[M(x)=o] <= e^epsilon * P[M(x')=o] for every input pair and every
// output. A relative slack of 1e-12 absorbs rounding in the stored
// probabilities. Unimplemented (unsupported mechanism) for samplers;
// InvalidArgument for malformed matrices.
absl::StatusOr<VerificationReport> VerifyDpBound(
    const MechanismHandle& mechanism, double epsilon);

}  // namespace dpconsent

#endif  // DPCONSENT_DP_VERIFIER_H_
