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

#ifndef DPCONSENT_TEXT_TEMPLATES_H_
#define DPCONSENT_TEXT_TEMPLATES_H_

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpconsent/concern.h"
#include "dpconsent/scenario.h"
#include "json.hpp"

namespace dpconsent {

// Text description for one (scenario, dp level) pair. The preamble carries
// the three required pieces of information; sentences[i] addresses concern
// i.
struct TextTemplate {
  struct Preamble {
    std::string data_collected;
    std::string disturbance_stage;
    std::string inference_protection;
  };

  ScenarioKind scenario;
  DpLevel dp_level;
  // The scenario's data type as users read it ("salary", "location").
  std::string data_name;
  Preamble preamble;
  std::map<int, std::string> sentences;

  std::string PreambleText() const;
};

// Structural parse of the on-disk format. Missing sentences are not a parse
// error; ValidateTemplate reports them.
absl::StatusOr<TextTemplate> ParseTemplate(const nlohmann::json& j);
nlohmann::json TemplateJson(const TextTemplate& t);

struct TemplateViolation {
  std::string code;
  std::string message;
};

struct TemplateValidation {
  std::vector<TemplateViolation> violations;
  bool valid() const { return violations.empty(); }
};

// Mechanical checks:
//  - all seven sentences present and non-empty;
//  - the preamble names the scenario's data type;
//  - stage wording matches the level: LocalDP needs "before" or
//    "on your device" and must not say "when sharing"/"when answering";
//    CentralDP needs "when sharing" or "when answering" and must not say
//    "on your device";
//  - the inference-protection piece and every sentence carry an
//    inference-prevention clause ("cannot", "never", "only", ...).
TemplateValidation ValidateTemplate(const TextTemplate& t);

struct TextBlock {
  ScenarioKind scenario;
  DpLevel dp_level;
  std::string preamble;
  // Ascending concern id.
  std::vector<std::pair<int, std::string>> sentences;
  // Preamble and sentences joined into one paragraph.
  std::string paragraph;
};

nlohmann::json TextBlockJson(const TextBlock& b);

TextBlock RenderTextDescription(const TextTemplate& t,
                                const ConcernSet& selection);

// Templates loaded from a directory of *.json files, one per (scenario,
// level). Reads are concurrent; ReloadIfChanged() swaps in a fresh set when
// any file's modification time moved.
class TemplateStore {
 public:
  static absl::StatusOr<std::unique_ptr<TemplateStore>> LoadDirectory(
      std::filesystem::path dir);
  static std::unique_ptr<TemplateStore> FromTemplates(
      std::vector<TextTemplate> templates);

  // NotFound ("missing template") when the pair has no template.
  absl::StatusOr<std::shared_ptr<const TextTemplate>> Get(
      ScenarioKind scenario, DpLevel level) const;

  absl::StatusOr<TextBlock> Render(ScenarioKind scenario, DpLevel level,
                                   const ConcernSet& selection) const;

  // Returns true when a reload happened. A directory that fails to parse
  // keeps the previous templates and returns the error.
  absl::StatusOr<bool> ReloadIfChanged();

 private:
  using Key = std::pair<ScenarioKind, DpLevel>;
  using Map = std::map<Key, std::shared_ptr<const TextTemplate>>;
  using Stamps = std::map<std::string, std::filesystem::file_time_type>;

  static absl::StatusOr<std::pair<Map, Stamps>> ReadDirectory(
      const std::filesystem::path& dir);
  static absl::StatusOr<Stamps> StatDirectory(
      const std::filesystem::path& dir);

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  Map templates_;
  Stamps stamps_;
};

}  // namespace dpconsent

#endif  // DPCONSENT_TEXT_TEMPLATES_H_
