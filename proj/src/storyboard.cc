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

#include "dpconsent/storyboard.h"

#include <optional>

#include "absl/strings/str_cat.h"

namespace dpconsent {

absl::string_view ActorName(Actor a) {
  switch (a) {
    case Actor::kUserDevice:
      return "user-device";
    case Actor::kOrganization:
      return "organization";
    case Actor::kRecipient:
      return "analyst/recipient";
  }
  return "unknown";
}

absl::string_view DataTagName(DataTag t) {
  return t == DataTag::kRaw ? "raw" : "perturbed";
}

absl::string_view StepKindName(StepKind k) {
  switch (k) {
    case StepKind::kEnterValue:
      return "enter_value";
    case StepKind::kPerturbOnDevice:
      return "perturb_on_device";
    case StepKind::kTransmit:
      return "transmit";
    case StepKind::kAggregate:
      return "aggregate";
    case StepKind::kSubmitRaw:
      return "submit_raw";
    case StepKind::kStoreRaw:
      return "store_raw";
    case StepKind::kQuery:
      return "query";
    case StepKind::kAddNoise:
      return "add_noise";
    case StepKind::kRelease:
      return "release";
  }
  return "unknown";
}

bool StoryboardStep::ShowsRaw() const {
  for (const TaggedValue& v : visible_data) {
    if (v.tag == DataTag::kRaw) return true;
  }
  return false;
}

namespace {

struct Wording {
  std::string value;      // "your salary"
  std::string noisy;      // "a changed salary"
  std::string aggregate;  // "average salary"
  std::string query;      // "What is the average salary?"
};

Wording WordingFor(ScenarioKind scenario) {
  if (scenario == ScenarioKind::kSalaryNumeric) {
    return {"your salary", "a changed salary", "salary statistics",
            "What is the average salary of the participants?"};
  }
  return {"your area", "a reported area", "area counts",
          "How many people were in each area?"};
}

StoryboardScript LocalScript(ScenarioKind scenario) {
  const Wording w = WordingFor(scenario);
  const std::string raw = scenario == ScenarioKind::kSalaryNumeric
                              ? "salary"
                              : "location";
  const std::string noisy = absl::StrCat("noisy_", raw);
  StoryboardScript s{scenario, DpLevel::kLocal, {}};
  s.steps.push_back({0, StepKind::kEnterValue, Actor::kUserDevice,
                     absl::StrCat("Type ", w.value,
                                  ". It stays on your device."),
                     {{raw, DataTag::kRaw}},
                     /*requires_user_input=*/true});
  s.steps.push_back({1, StepKind::kPerturbOnDevice, Actor::kUserDevice,
                     absl::StrCat("Your device adds random noise and turns ",
                                  w.value, " into ", w.noisy, "."),
                     {{raw, DataTag::kRaw}, {noisy, DataTag::kPerturbed}},
                     false});
  s.steps.push_back({2, StepKind::kTransmit, Actor::kOrganization,
                     absl::StrCat("Only ", w.noisy,
                                  " is sent. The real value never leaves "
                                  "your device."),
                     {{noisy, DataTag::kPerturbed}},
                     false});
  s.steps.push_back({3, StepKind::kAggregate, Actor::kOrganization,
                     absl::StrCat("The organization combines many noisy "
                                  "answers into ",
                                  w.aggregate,
                                  ". It never sees your real value."),
                     {{absl::StrCat("noisy_", raw, "_records"),
                       DataTag::kPerturbed}},
                     false});
  return s;
}

StoryboardScript CentralScript(ScenarioKind scenario) {
  const Wording w = WordingFor(scenario);
  const std::string raw = scenario == ScenarioKind::kSalaryNumeric
                              ? "salary"
                              : "location";
  const std::string records = absl::StrCat(raw, "_records");
  const std::string answer = "noisy_answer";
  StoryboardScript s{scenario, DpLevel::kCentral, {}};
  s.steps.push_back({0, StepKind::kSubmitRaw, Actor::kUserDevice,
                     absl::StrCat("Type ", w.value,
                                  ". It is sent to the organization as is."),
                     {{raw, DataTag::kRaw}},
                     /*requires_user_input=*/true});
  s.steps.push_back({1, StepKind::kStoreRaw, Actor::kOrganization,
                     absl::StrCat("The organization stores ", w.value,
                                  " without any change in a protected "
                                  "database."),
                     {{records, DataTag::kRaw}},
                     false});
  s.steps.push_back({2, StepKind::kQuery, Actor::kOrganization,
                     absl::StrCat("An analyst asks a question: \"", w.query,
                                  "\""),
                     {{records, DataTag::kRaw}},
                     false});
  s.steps.push_back({3, StepKind::kAddNoise, Actor::kOrganization,
                     "The organization computes the answer and adds random "
                     "noise to it before it leaves the database.",
                     {{records, DataTag::kRaw}, {answer, DataTag::kPerturbed}},
                     false});
  s.steps.push_back({4, StepKind::kRelease, Actor::kRecipient,
                     "The analyst only receives the noisy answer, which "
                     "cannot reveal your individual value.",
                     {{answer, DataTag::kPerturbed}},
                     false});
  return s;
}

}  // namespace

StoryboardScript BuildStoryboard(ScenarioKind scenario, DpLevel level) {
  return level == DpLevel::kLocal ? LocalScript(scenario)
                                  : CentralScript(scenario);
}

std::vector<std::string> CheckStoryboard(const StoryboardScript& script) {
  std::vector<std::string> violations;
  for (size_t i = 0; i < script.steps.size(); ++i) {
    if (script.steps[i].index != static_cast<int>(i)) {
      violations.push_back(absl::StrCat("step at position ", i, " has index ",
                                        script.steps[i].index));
    }
  }

  if (script.dp_level == DpLevel::kLocal) {
    for (const StoryboardStep& step : script.steps) {
      if (step.actor != Actor::kUserDevice && step.ShowsRaw()) {
        violations.push_back(absl::StrCat("step ", step.index, " shows a raw "
                                          "value to ",
                                          ActorName(step.actor)));
      }
    }
    return violations;
  }

  std::optional<size_t> first_query;
  std::optional<size_t> noise_step;
  for (size_t i = 0; i < script.steps.size(); ++i) {
    if (script.steps[i].kind == StepKind::kQuery && !first_query) {
      first_query = i;
    }
    if (script.steps[i].kind == StepKind::kAddNoise && !noise_step) {
      noise_step = i;
    }
  }
  if (!first_query.has_value()) {
    violations.push_back("central script has no query step");
  } else {
    bool raw_at_org = false;
    for (size_t i = 0; i < *first_query; ++i) {
      const StoryboardStep& step = script.steps[i];
      raw_at_org |= step.actor == Actor::kOrganization && step.ShowsRaw();
    }
    if (!raw_at_org) {
      violations.push_back(
          "no raw value reaches the organization before the query step");
    }
  }
  if (!noise_step.has_value()) {
    violations.push_back("central script has no noise-addition step");
  }
  for (size_t i = 0; i < script.steps.size(); ++i) {
    const StoryboardStep& step = script.steps[i];
    if (step.actor != Actor::kRecipient) continue;
    if (noise_step.has_value() && i < *noise_step) {
      violations.push_back(absl::StrCat("step ", step.index,
                                        " reaches the recipient before noise "
                                        "is added"));
    }
    if (step.ShowsRaw()) {
      violations.push_back(absl::StrCat("step ", step.index,
                                        " shows a raw value to the "
                                        "recipient"));
    }
  }
  return violations;
}

nlohmann::json StoryboardJson(const StoryboardScript& script) {
  nlohmann::json steps = nlohmann::json::array();
  for (const StoryboardStep& step : script.steps) {
    nlohmann::json visible = nlohmann::json::array();
    for (const TaggedValue& v : step.visible_data) {
      visible.push_back({{"name", v.name}, {"tag", DataTagName(v.tag)}});
    }
    steps.push_back({{"index", step.index},
                     {"kind", StepKindName(step.kind)},
                     {"actor", ActorName(step.actor)},
                     {"caption", step.caption},
                     {"visible_data", visible},
                     {"requires_user_input", step.requires_user_input}});
  }
  return {{"type", "storyboard"},
          {"schema_version", 1},
          {"scenario", ScenarioName(script.scenario)},
          {"dp_level", DpLevelName(script.dp_level)},
          {"steps", steps}};
}

}  // namespace dpconsent
