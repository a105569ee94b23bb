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

#include "dpconsent/mechanisms.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {
namespace {

absl::Status ValidateEpsilonAndSensitivity(double epsilon,
                                           double sensitivity) {
  if (std::isnan(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be >= 0, got ", epsilon));
  }
  if (std::isinf(epsilon)) {
    return absl::InvalidArgumentError(
        "epsilon = inf is only available through NoPrivacyLimit()");
  }
  if (!std::isfinite(sensitivity) || sensitivity < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be finite and >= 0, got ",
                     sensitivity));
  }
  return absl::OkStatus();
}

}  // namespace

nlohmann::json DataValueJson(const DataValue& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

absl::StatusOr<DataValue> DataValueFromJson(const nlohmann::json& j) {
  if (j.is_number()) return DataValue(j.get<double>());
  if (j.is_string()) return DataValue(j.get<std::string>());
  return absl::InvalidArgumentError(
      "malformed input: data value must be a number or a cell name");
}

absl::StatusOr<MechanismParams> MechanismParams::Create(double epsilon,
                                                        double sensitivity,
                                                        DataDomain domain) {
  if (absl::Status s = ValidateEpsilonAndSensitivity(epsilon, sensitivity);
      !s.ok()) {
    return s;
  }
  return MechanismParams(epsilon, sensitivity, std::move(domain),
                         /*limit_mode=*/false);
}

absl::StatusOr<MechanismParams> MechanismParams::ForLocal(
    const Scenario& scenario, double epsilon) {
  double sensitivity = scenario.kind() == ScenarioKind::kSalaryNumeric
                           ? scenario.numeric().width()
                           : 1.0;
  return Create(epsilon, sensitivity, scenario.domain());
}

MechanismParams MechanismParams::NoPrivacyLimit(double sensitivity,
                                                DataDomain domain) {
  return MechanismParams(std::numeric_limits<double>::infinity(), sensitivity,
                         std::move(domain), /*limit_mode=*/true);
}

double MechanismParams::laplace_scale() const {
  if (limit_mode_ || sensitivity_ == 0) return 0.0;
  return sensitivity_ / epsilon_;
}

absl::StatusOr<MechanismParams> MechanismParams::WithEpsilon(
    double epsilon) const {
  return Create(epsilon, sensitivity_, domain_);
}

absl::StatusOr<MechanismParams> MechanismParams::WithSensitivity(
    double sensitivity) const {
  if (limit_mode_) return NoPrivacyLimit(sensitivity, domain_);
  return Create(epsilon_, sensitivity, domain_);
}

nlohmann::json NoiseSampleJson(const NoiseSample& s) {
  nlohmann::json j = {{"input_value", DataValueJson(s.input_value)},
                      {"output_value", DataValueJson(s.output_value)},
                      {"mechanism_id", s.mechanism_id}};
  j["seed"] = s.seed.has_value() ? nlohmann::json(*s.seed) : nullptr;
  return j;
}

double LaplaceCdf(double x, double center, double scale) {
  if (scale == 0) return x < center ? 0.0 : 1.0;
  double z = (x - center) / scale;
  return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double LaplaceQuantile(double q, double center, double scale) {
  if (q < 0.5) return center + scale * std::log(2.0 * q);
  return center - scale * std::log(2.0 - 2.0 * q);
}

double SampleLaplace(double scale, Rng& rng) {
  if (scale == 0) return 0.0;
  // Inverse CDF on u in (0, 1); the open interval keeps log() finite.
  return LaplaceQuantile(rng.UniformOpen01(), 0.0, scale);
}

absl::StatusOr<NoiseSample> LaplacePerturb(double x,
                                           const MechanismParams& params,
                                           Rng& rng) {
  const auto* domain = std::get_if<NumericDomain>(&params.domain());
  if (domain == nullptr) {
    return absl::InvalidArgumentError(
        "laplace mechanism requires a numeric domain");
  }
  if (!std::isfinite(x)) {
    return absl::InvalidArgumentError("malformed input: value is not finite");
  }
  if (!domain->Contains(x)) {
    return absl::OutOfRangeError(
        absl::StrCat("clamp violation: ", x, " outside [", domain->lo(), ", ",
                     domain->hi(), "]"));
  }
  if (!params.limit_mode() && params.epsilon() == 0) {
    return absl::InvalidArgumentError(
        "laplace mechanism requires epsilon > 0");
  }
  double output = x + SampleLaplace(params.laplace_scale(), rng);
  return NoiseSample{x, output, std::string(kLaplaceMechanismId),
                     std::nullopt};
}

absl::StatusOr<NoiseSample> LaplacePerturb(double x,
                                           const MechanismParams& params,
                                           std::optional<uint64_t> seed) {
  Rng rng = Rng::FromOptionalSeed(seed);
  absl::StatusOr<NoiseSample> s = LaplacePerturb(x, params, rng);
  if (s.ok()) s->seed = seed;
  return s;
}

// Both probabilities are written in terms of exp(-epsilon) so that large
// epsilon (and the +inf limit) never overflows.
double RrKeepProbability(int k, double epsilon) {
  double t = std::exp(-epsilon);
  return 1.0 / (1.0 + (k - 1) * t);
}

double RrOtherProbability(int k, double epsilon) {
  double t = std::exp(-epsilon);
  return t / (1.0 + (k - 1) * t);
}

std::vector<double> RrTransitionRow(int k, double epsilon, int true_index) {
  std::vector<double> row(k, RrOtherProbability(k, epsilon));
  row[true_index] = RrKeepProbability(k, epsilon);
  return row;
}

int RrPerturbIndex(int true_index, int k, double epsilon, Rng& rng) {
  double keep = RrKeepProbability(k, epsilon);
  if (keep >= 1.0 || rng.UniformOpen01() < keep) return true_index;
  // Uniform over the k - 1 other cells.
  int other = static_cast<int>(rng.UniformIndex(k - 1));
  return other >= true_index ? other + 1 : other;
}

absl::StatusOr<NoiseSample> RrPerturb(absl::string_view cell,
                                      const MechanismParams& params,
                                      Rng& rng) {
  const auto* grid = std::get_if<CellGrid>(&params.domain());
  if (grid == nullptr) {
    return absl::InvalidArgumentError(
        "randomized response requires a cell grid domain");
  }
  std::optional<int> index = grid->IndexOf(cell);
  if (!index.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed input: unknown cell '", cell, "'"));
  }
  int out = RrPerturbIndex(*index, grid->size(), params.epsilon(), rng);
  return NoiseSample{std::string(cell), grid->name(out),
                     std::string(kRandomizedResponseId), std::nullopt};
}

absl::StatusOr<NoiseSample> RrPerturb(absl::string_view cell,
                                      const MechanismParams& params,
                                      std::optional<uint64_t> seed) {
  Rng rng = Rng::FromOptionalSeed(seed);
  absl::StatusOr<NoiseSample> s = RrPerturb(cell, params, rng);
  if (s.ok()) s->seed = seed;
  return s;
}

absl::StatusOr<NoiseSample> LocalPerturb(const DataValue& value,
                                         const MechanismParams& params,
                                         Rng& rng) {
  if (std::holds_alternative<NumericDomain>(params.domain())) {
    if (!std::holds_alternative<double>(value)) {
      return absl::InvalidArgumentError(
          "malformed input: numeric domain requires a number");
    }
    return LaplacePerturb(std::get<double>(value), params, rng);
  }
  if (!std::holds_alternative<std::string>(value)) {
    return absl::InvalidArgumentError(
        "malformed input: cell domain requires a cell name");
  }
  return RrPerturb(std::get<std::string>(value), params, rng);
}

}  // namespace dpconsent
