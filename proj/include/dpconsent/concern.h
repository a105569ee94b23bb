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

#ifndef DPCONSENT_CONCERN_H_
#define DPCONSENT_CONCERN_H_

#include <array>
#include <bitset>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace dpconsent {

inline constexpr int kNumConcerns = 7;

// Stable identifier of one of the seven privacy concerns. Ids are persisted
// in session records, so they must never be renumbered.
enum class ConcernId : uint8_t {
  kHack = 1,
  kLaw = 2,
  kOrganization = 3,
  kDisclosure = 4,
  kAnalyst = 5,
  kGraphs = 6,
  kShare = 7,
};

struct Concern {
  ConcernId id;
  absl::string_view abbreviation;
  absl::string_view description;
};

// The full taxonomy, ordered by id.
std::span<const Concern, kNumConcerns> ListConcerns();

// Set of concern ids selected by a user. Construction from raw integers is
// validated; the set itself can only hold ids 1..7.
class ConcernSet {
 public:
  ConcernSet() = default;
  ConcernSet(std::initializer_list<ConcernId> ids);

  // Rejects ids outside 1..7 and duplicates.
  static absl::StatusOr<ConcernSet> FromIds(std::span<const int> ids);
  // Bit i-1 set <=> concern i selected. Values >= 128 are rejected.
  static absl::StatusOr<ConcernSet> FromMask(uint32_t mask);

  bool Contains(ConcernId id) const {
    return bits_.test(static_cast<size_t>(id) - 1);
  }
  bool empty() const { return bits_.none(); }
  size_t size() const { return bits_.count(); }
  uint32_t mask() const { return static_cast<uint32_t>(bits_.to_ulong()); }

  // Ascending id order.
  std::vector<ConcernId> ids() const;
  std::vector<int> int_ids() const;

  bool IsSubsetOf(const ConcernSet& other) const {
    return (bits_ & ~other.bits_).none();
  }

  friend bool operator==(const ConcernSet&, const ConcernSet&) = default;

 private:
  std::bitset<kNumConcerns> bits_;
};

enum class DpLevel : uint8_t {
  kCentral = 0,
  kLocal = 1,
};

// Strictness ordering: LocalDP > CentralDP.
inline int Strictness(DpLevel level) { return static_cast<int>(level); }

absl::string_view DpLevelName(DpLevel level);
absl::StatusOr<DpLevel> ParseDpLevel(absl::string_view name);

// LocalDP iff any of concerns 1..4 is selected; an empty selection (and any
// selection drawn only from 5..7) gets CentralDP.
DpLevel MatchDpLevel(const ConcernSet& selection);

// Validating overload for untrusted integer ids.
absl::StatusOr<DpLevel> MatchDpLevel(std::span<const int> ids);

// Machine-readable catalog: {"version":1,"concerns":[{id,abbreviation,
// description},...]}.
nlohmann::json ConcernCatalogJson();

}  // namespace dpconsent

#endif  // DPCONSENT_CONCERN_H_
