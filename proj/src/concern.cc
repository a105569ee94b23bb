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

#include "dpconsent/concern.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {
namespace {

constexpr std::array<Concern, kNumConcerns> kConcerns = {{
    {ConcernId::kHack, "Hack", "My data will be hacked by hackers."},
    {ConcernId::kLaw, "Law",
     "My data will be forcibly acquired by the government."},
    {ConcernId::kOrganization, "Organization",
     "My data will be stolen by unrelated employees in the organization."},
    {ConcernId::kDisclosure, "Disclosure",
     "My data will be disclosed to others by the organization."},
    {ConcernId::kAnalyst, "Analyst",
     "My data will be accessed by the data analysts in the organization."},
    {ConcernId::kGraphs, "Graphs",
     "The graphs and tables generated by the organization will reveal my "
     "data."},
    {ConcernId::kShare, "Share",
     "The organization will reveal my data when sharing the processed "
     "dataset with others."},
}};

// Concerns 1..4 put the organization itself (or anyone who breaches it) in
// the threat model.
constexpr uint32_t kLocalTriggerMask = 0b0001111;

}  // namespace

std::span<const Concern, kNumConcerns> ListConcerns() { return kConcerns; }

ConcernSet::ConcernSet(std::initializer_list<ConcernId> ids) {
  for (ConcernId id : ids) bits_.set(static_cast<size_t>(id) - 1);
}

absl::StatusOr<ConcernSet> ConcernSet::FromIds(std::span<const int> ids) {
  ConcernSet set;
  for (int id : ids) {
    if (id < 1 || id > kNumConcerns) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed selection: concern id ", id,
                       " is outside 1..", kNumConcerns));
    }
    if (set.bits_.test(id - 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed selection: duplicate concern id ", id));
    }
    set.bits_.set(id - 1);
  }
  return set;
}

absl::StatusOr<ConcernSet> ConcernSet::FromMask(uint32_t mask) {
  if (mask >= (1u << kNumConcerns)) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed selection: mask ", mask, " has bits above 7"));
  }
  ConcernSet set;
  set.bits_ = std::bitset<kNumConcerns>(mask);
  return set;
}

std::vector<ConcernId> ConcernSet::ids() const {
  std::vector<ConcernId> out;
  for (int i = 0; i < kNumConcerns; ++i) {
    if (bits_.test(i)) out.push_back(static_cast<ConcernId>(i + 1));
  }
  return out;
}

std::vector<int> ConcernSet::int_ids() const {
  std::vector<int> out;
  for (ConcernId id : ids()) out.push_back(static_cast<int>(id));
  return out;
}

absl::string_view DpLevelName(DpLevel level) {
  return level == DpLevel::kLocal ? "LocalDP" : "CentralDP";
}

absl::StatusOr<DpLevel> ParseDpLevel(absl::string_view name) {
  if (name == "LocalDP") return DpLevel::kLocal;
  if (name == "CentralDP") return DpLevel::kCentral;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown dp level '", name, "'"));
}

DpLevel MatchDpLevel(const ConcernSet& selection) {
  return (selection.mask() & kLocalTriggerMask) != 0 ? DpLevel::kLocal
                                                     : DpLevel::kCentral;
}

absl::StatusOr<DpLevel> MatchDpLevel(std::span<const int> ids) {
  absl::StatusOr<ConcernSet> set = ConcernSet::FromIds(ids);
  if (!set.ok()) return set.status();
  return MatchDpLevel(*set);
}

nlohmann::json ConcernCatalogJson() {
  nlohmann::json concerns = nlohmann::json::array();
  for (const Concern& c : kConcerns) {
    concerns.push_back({{"id", static_cast<int>(c.id)},
                        {"abbreviation", c.abbreviation},
                        {"description", c.description}});
  }
  return {{"version", 1}, {"concerns", concerns}};
}

}  // namespace dpconsent
