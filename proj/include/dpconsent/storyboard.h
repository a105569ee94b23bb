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

#ifndef DPCONSENT_STORYBOARD_H_
#define DPCONSENT_STORYBOARD_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpconsent/concern.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

enum class Actor { kUserDevice, kOrganization, kRecipient };
enum class DataTag { kRaw, kPerturbed };
enum class StepKind {
  kEnterValue,
  kPerturbOnDevice,
  kTransmit,
  kAggregate,
  kSubmitRaw,
  kStoreRaw,
  kQuery,
  kAddNoise,
  kRelease,
};

absl::string_view ActorName(Actor a);
absl::string_view DataTagName(DataTag t);
absl::string_view StepKindName(StepKind k);

// A value shown in a frame. The storyboard carries names, not numbers; the
// player binds the user's example value to them.
struct TaggedValue {
  std::string name;
  DataTag tag;
};

struct StoryboardStep {
  int index;
  StepKind kind;
  Actor actor;
  std::string caption;
  std::vector<TaggedValue> visible_data;
  bool requires_user_input = false;

  bool ShowsRaw() const;
};

struct StoryboardScript {
  ScenarioKind scenario;
  DpLevel dp_level;
  std::vector<StoryboardStep> steps;
};

// LocalDP: enter value, perturb on device, transmit, aggregate.
// CentralDP: submit raw, store raw, query arrives, add noise, release.
StoryboardScript BuildStoryboard(ScenarioKind scenario, DpLevel level);

// Data-flow checks on the visible_data tags. Empty result means the script
// is sound:
//  - indices are 0..n-1 in order;
//  - LocalDP: no organization or recipient frame shows a raw value;
//  - CentralDP: a raw value sits at the organization before the first
//    query step, a noise-addition step exists, and no recipient frame after
//    it (or anywhere) shows a raw value.
std::vector<std::string> CheckStoryboard(const StoryboardScript& script);

nlohmann::json StoryboardJson(const StoryboardScript& script);

}  // namespace dpconsent

#endif  // DPCONSENT_STORYBOARD_H_
