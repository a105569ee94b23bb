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

#include "dpconsent/dp_verifier.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {
namespace {

constexpr double kRelativeSlack = 1e-12;
constexpr double kRowSumTolerance = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

absl::Status ValidateMatrix(const TransitionMatrix& m) {
  if (m.probabilities.empty()) {
    return absl::InvalidArgumentError("mechanism has no inputs");
  }
  const size_t outputs = m.probabilities.front().size();
  if (outputs == 0) {
    return absl::InvalidArgumentError("mechanism has no outputs");
  }
  for (size_t x = 0; x < m.probabilities.size(); ++x) {
    const std::vector<double>& row = m.probabilities[x];
    if (row.size() != outputs) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", x, " has ", row.size(), " outputs, expected ",
                       outputs));
    }
    double sum = 0;
    for (double p : row) {
      if (!std::isfinite(p) || p < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", x, " holds an invalid probability ", p));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", x, " sums to ", sum));
    }
  }
  return absl::OkStatus();
}

VerificationReport Enumerate(const TransitionMatrix& m, double epsilon) {
  VerificationReport report;
  report.mechanism = m.name;
  report.method = VerificationReport::Method::kEnumeration;
  report.epsilon = epsilon;
  report.bound = std::exp(epsilon);
  report.worst_ratio = 1.0;

  const int inputs = static_cast<int>(m.probabilities.size());
  const int outputs = static_cast<int>(m.probabilities.front().size());
  for (int o = 0; o < outputs; ++o) {
    for (int x = 0; x < inputs; ++x) {
      const double p = m.probabilities[x][o];
      for (int y = 0; y < inputs; ++y) {
        if (x == y) continue;
        const double q = m.probabilities[y][o];
        double ratio;
        if (q == 0) {
          if (p == 0) continue;
          ratio = kInf;
        } else {
          ratio = p / q;
        }
        if (!report.witness.has_value() || ratio > report.worst_ratio) {
          report.worst_ratio = ratio;
          report.witness = DpWitness{x, y, o};
        }
      }
    }
  }
  report.holds = report.worst_ratio <= report.bound * (1.0 + kRelativeSlack);
  return report;
}

VerificationReport Analytic(const LaplaceHandle& h, double epsilon) {
  VerificationReport report;
  report.mechanism = absl::StrCat("laplace(sensitivity=", h.sensitivity,
                                  ", epsilon=", h.epsilon, ")");
  report.method = VerificationReport::Method::kAnalytic;
  report.epsilon = epsilon;
  report.bound = std::exp(epsilon);
  // Density ratio at o for inputs x, x' is exp((|o - x'| - |o - x|) / b)
  // <= exp(|x - x'| / b) <= exp(sensitivity * eps_c / sensitivity).
  double log_ratio;
  if (h.sensitivity == 0) {
    log_ratio = 0;
  } else if (std::isinf(h.epsilon)) {
    log_ratio = kInf;
  } else {
    const double scale = h.sensitivity / h.epsilon;
    log_ratio = h.sensitivity / scale;
  }
  report.worst_ratio = std::exp(log_ratio);
  report.holds = report.worst_ratio <= report.bound * (1.0 + kRelativeSlack);
  return report;
}

}  // namespace

absl::StatusOr<TransitionMatrix> RandomizedResponseMatrix(int k,
                                                          double epsilon) {
  if (k < 2) {
    return absl::InvalidArgumentError("randomized response needs k >= 2");
  }
  if (std::isnan(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError("epsilon must be >= 0");
  }
  TransitionMatrix m;
  m.name = absl::StrCat("k_rr(k=", k, ", epsilon=", epsilon, ")");
  for (int x = 0; x < k; ++x) {
    m.probabilities.push_back(RrTransitionRow(k, epsilon, x));
  }
  return m;
}

TransitionMatrix IdentityMatrix(int k) {
  TransitionMatrix m;
  m.name = absl::StrCat("identity(k=", k, ")");
  m.probabilities.assign(k, std::vector<double>(k, 0.0));
  for (int x = 0; x < k; ++x) m.probabilities[x][x] = 1.0;
  return m;
}

nlohmann::json VerificationReportJson(const VerificationReport& r) {
  auto num = [](double v) {
    return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v);
  };
  nlohmann::json j = {
      {"mechanism", r.mechanism},
      {"method", r.method == VerificationReport::Method::kEnumeration
                     ? "enumeration"
                     : "analytic"},
      {"epsilon", num(r.epsilon)},
      {"bound", num(r.bound)},
      {"worst_ratio", num(r.worst_ratio)},
      {"result", r.holds ? "holds" : "violated"},
  };
  if (r.witness.has_value() && !r.holds) {
    j["witness"] = {{"input", r.witness->input},
                    {"neighbour_input", r.witness->neighbour_input},
                    {"output", r.witness->output}};
  }
  return j;
}

absl::StatusOr<VerificationReport> VerifyDpBound(
    const MechanismHandle& mechanism, double epsilon) {
  if (std::isnan(epsilon) || epsilon < 0) {
    return absl::InvalidArgumentError("epsilon must be >= 0");
  }
  if (const auto* m = std::get_if<TransitionMatrix>(&mechanism)) {
    if (absl::Status s = ValidateMatrix(*m); !s.ok()) return s;
    return Enumerate(*m, epsilon);
  }
  if (const auto* h = std::get_if<LaplaceHandle>(&mechanism)) {
    if (!(h->sensitivity >= 0) || !(h->epsilon > 0)) {
      return absl::InvalidArgumentError(
          "laplace handle needs sensitivity >= 0 and epsilon > 0");
    }
    return Analytic(*h, epsilon);
  }
  return absl::UnimplementedError(absl::StrCat(
      "unsupported mechanism '", std::get<SamplerHandle>(mechanism).name,
      "': output probabilities are not enumerable"));
}

}  // namespace dpconsent
