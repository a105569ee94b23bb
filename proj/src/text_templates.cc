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

#include "dpconsent/text_templates.h"

#include <fstream>
#include <mutex>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"

namespace dpconsent {
namespace {

namespace fs = std::filesystem;

constexpr absl::string_view kLocalStageMarkers[] = {"before",
                                                   "on your device"};
constexpr absl::string_view kCentralStageMarkers[] = {"when sharing",
                                                     "when answering"};
constexpr absl::string_view kInferenceMarkers[] = {
    "cannot", "can't", "can not", "never", "only", "no one", "not able"};

bool ContainsAny(absl::string_view text,
                 std::span<const absl::string_view> needles) {
  std::string lower = absl::AsciiStrToLower(text);
  for (absl::string_view n : needles) {
    if (absl::StrContains(lower, n)) return true;
  }
  return false;
}

absl::string_view CanonicalDataName(ScenarioKind kind) {
  return kind == ScenarioKind::kSalaryNumeric ? "salary" : "location";
}

absl::StatusOr<std::string> RequireString(const nlohmann::json& j,
                                          absl::string_view key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("template field '", key, "' missing or not a string"));
  }
  return it->get<std::string>();
}

}  // namespace

std::string TextTemplate::PreambleText() const {
  return absl::StrJoin({preamble.data_collected, preamble.disturbance_stage,
                        preamble.inference_protection},
                       " ");
}

absl::StatusOr<TextTemplate> ParseTemplate(const nlohmann::json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("template must be a JSON object");
  }
  TextTemplate t;
  absl::StatusOr<std::string> scenario = RequireString(j, "scenario");
  if (!scenario.ok()) return scenario.status();
  absl::StatusOr<ScenarioKind> kind = ParseScenario(*scenario);
  if (!kind.ok()) return kind.status();
  t.scenario = *kind;

  absl::StatusOr<std::string> level = RequireString(j, "dp_level");
  if (!level.ok()) return level.status();
  absl::StatusOr<DpLevel> dp = ParseDpLevel(*level);
  if (!dp.ok()) return dp.status();
  t.dp_level = *dp;

  absl::StatusOr<std::string> data_name = RequireString(j, "data_name");
  if (!data_name.ok()) return data_name.status();
  t.data_name = *data_name;

  auto pre = j.find("preamble");
  if (pre == j.end() || !pre->is_object()) {
    return absl::InvalidArgumentError("template field 'preamble' missing");
  }
  for (auto [key, field] :
       {std::pair{"data_collected", &t.preamble.data_collected},
        std::pair{"disturbance_stage", &t.preamble.disturbance_stage},
        std::pair{"inference_protection", &t.preamble.inference_protection}}) {
    absl::StatusOr<std::string> v = RequireString(*pre, key);
    if (!v.ok()) return v.status();
    *field = *v;
  }

  auto sentences = j.find("sentences");
  if (sentences == j.end() || !sentences->is_object()) {
    return absl::InvalidArgumentError("template field 'sentences' missing");
  }
  for (const auto& [key, value] : sentences->items()) {
    int id = 0;
    try {
      size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      return absl::InvalidArgumentError(
          absl::StrCat("sentence key '", key, "' is not a concern id"));
    }
    if (!value.is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sentence ", id, " is not a string"));
    }
    t.sentences[id] = value.get<std::string>();
  }
  return t;
}

nlohmann::json TemplateJson(const TextTemplate& t) {
  nlohmann::json sentences = nlohmann::json::object();
  for (const auto& [id, text] : t.sentences) {
    sentences[std::to_string(id)] = text;
  }
  return {{"version", 1},
          {"scenario", ScenarioName(t.scenario)},
          {"dp_level", DpLevelName(t.dp_level)},
          {"data_name", t.data_name},
          {"preamble",
           {{"data_collected", t.preamble.data_collected},
            {"disturbance_stage", t.preamble.disturbance_stage},
            {"inference_protection", t.preamble.inference_protection}}},
          {"sentences", sentences}};
}

TemplateValidation ValidateTemplate(const TextTemplate& t) {
  TemplateValidation report;
  auto add = [&report](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };

  for (int id = 1; id <= kNumConcerns; ++id) {
    auto it = t.sentences.find(id);
    if (it == t.sentences.end() || it->second.empty()) {
      add("missing_sentence", absl::StrCat("concern ", id, " missing"));
    } else if (!ContainsAny(it->second, kInferenceMarkers)) {
      add("no_inference_clause",
          absl::StrCat("concern ", id,
                       " sentence lacks an inference-prevention clause"));
    }
  }
  for (const auto& [id, text] : t.sentences) {
    if (id < 1 || id > kNumConcerns) {
      add("unknown_concern", absl::StrCat("sentence for unknown concern ", id));
    }
  }

  const absl::string_view expected_name = CanonicalDataName(t.scenario);
  if (absl::AsciiStrToLower(t.data_name) != expected_name) {
    add("data_name_mismatch",
        absl::StrCat("data name '", t.data_name, "' does not match scenario ",
                     ScenarioName(t.scenario)));
  }
  if (t.data_name.empty() ||
      !absl::StrContains(absl::AsciiStrToLower(t.preamble.data_collected),
                         absl::AsciiStrToLower(t.data_name))) {
    add("data_not_named",
        "preamble does not name the data being collected");
  }

  const std::string preamble = t.PreambleText();
  if (t.dp_level == DpLevel::kLocal) {
    if (!ContainsAny(t.preamble.disturbance_stage, kLocalStageMarkers)) {
      add("stage_missing",
          "local preamble must say noise is added before data leaves the "
          "device");
    }
    if (ContainsAny(preamble, kCentralStageMarkers)) {
      add("stage_mismatch",
          "local preamble describes noising at sharing/answer time");
    }
  } else {
    if (!ContainsAny(t.preamble.disturbance_stage, kCentralStageMarkers)) {
      add("stage_missing",
          "central preamble must say noise is added when sharing or when "
          "answering");
    }
    constexpr absl::string_view kDevice[] = {"on your device"};
    if (ContainsAny(preamble, kDevice)) {
      add("stage_mismatch", "central preamble describes on-device noising");
    }
  }

  if (!ContainsAny(t.preamble.inference_protection, kInferenceMarkers)) {
    add("no_inference_clause",
        "preamble lacks an explanation of why the data cannot be inferred");
  }
  return report;
}

nlohmann::json TextBlockJson(const TextBlock& b) {
  nlohmann::json sentences = nlohmann::json::array();
  for (const auto& [id, text] : b.sentences) {
    sentences.push_back({{"concern_id", id}, {"text", text}});
  }
  return {{"scenario", ScenarioName(b.scenario)},
          {"dp_level", DpLevelName(b.dp_level)},
          {"preamble", b.preamble},
          {"sentences", sentences},
          {"paragraph", b.paragraph}};
}

TextBlock RenderTextDescription(const TextTemplate& t,
                                const ConcernSet& selection) {
  TextBlock block;
  block.scenario = t.scenario;
  block.dp_level = t.dp_level;
  block.preamble = t.PreambleText();
  block.paragraph = block.preamble;
  for (ConcernId id : selection.ids()) {
    auto it = t.sentences.find(static_cast<int>(id));
    if (it == t.sentences.end()) continue;
    block.sentences.emplace_back(it->first, it->second);
    absl::StrAppend(&block.paragraph, " ", it->second);
  }
  return block;
}

absl::StatusOr<TemplateStore::Stamps> TemplateStore::StatDirectory(
    const fs::path& dir) {
  std::error_code ec;
  Stamps stamps;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() != ".json") continue;
    stamps[entry.path().string()] = fs::last_write_time(entry.path(), ec);
  }
  if (ec) {
    return absl::NotFoundError(absl::StrCat("cannot read template directory ",
                                            dir.string(), ": ", ec.message()));
  }
  return stamps;
}

absl::StatusOr<std::pair<TemplateStore::Map, TemplateStore::Stamps>>
TemplateStore::ReadDirectory(const fs::path& dir) {
  absl::StatusOr<Stamps> stamps = StatDirectory(dir);
  if (!stamps.ok()) return stamps.status();
  Map map;
  for (const auto& [path, unused] : *stamps) {
    std::ifstream in(path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError(
          absl::StrCat("template ", path, " is not valid JSON"));
    }
    absl::StatusOr<TextTemplate> t = ParseTemplate(j);
    if (!t.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": ", t.status().message()));
    }
    Key key{t->scenario, t->dp_level};
    if (map.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": duplicate template for ",
                       ScenarioName(t->scenario), "/",
                       DpLevelName(t->dp_level)));
    }
    map[key] = std::make_shared<const TextTemplate>(std::move(*t));
  }
  return std::make_pair(std::move(map), std::move(*stamps));
}

absl::StatusOr<std::unique_ptr<TemplateStore>> TemplateStore::LoadDirectory(
    fs::path dir) {
  auto loaded = ReadDirectory(dir);
  if (!loaded.ok()) return loaded.status();
  auto store = std::unique_ptr<TemplateStore>(new TemplateStore());
  store->dir_ = std::move(dir);
  store->templates_ = std::move(loaded->first);
  store->stamps_ = std::move(loaded->second);
  return store;
}

std::unique_ptr<TemplateStore> TemplateStore::FromTemplates(
    std::vector<TextTemplate> templates) {
  auto store = std::unique_ptr<TemplateStore>(new TemplateStore());
  for (TextTemplate& t : templates) {
    Key key{t.scenario, t.dp_level};
    store->templates_[key] = std::make_shared<const TextTemplate>(std::move(t));
  }
  return store;
}

absl::StatusOr<std::shared_ptr<const TextTemplate>> TemplateStore::Get(
    ScenarioKind scenario, DpLevel level) const {
  std::shared_lock lock(mu_);
  auto it = templates_.find({scenario, level});
  if (it == templates_.end()) {
    return absl::NotFoundError(absl::StrCat("missing template for ",
                                            ScenarioName(scenario), "/",
                                            DpLevelName(level)));
  }
  return it->second;
}

absl::StatusOr<TextBlock> TemplateStore::Render(
    ScenarioKind scenario, DpLevel level, const ConcernSet& selection) const {
  absl::StatusOr<std::shared_ptr<const TextTemplate>> t = Get(scenario, level);
  if (!t.ok()) return t.status();
  return RenderTextDescription(**t, selection);
}

absl::StatusOr<bool> TemplateStore::ReloadIfChanged() {
  if (dir_.empty()) return false;
  absl::StatusOr<Stamps> stamps = StatDirectory(dir_);
  if (!stamps.ok()) return stamps.status();
  {
    std::shared_lock lock(mu_);
    if (*stamps == stamps_) return false;
  }
  auto loaded = ReadDirectory(dir_);
  if (!loaded.ok()) return loaded.status();
  std::unique_lock lock(mu_);
  templates_ = std::move(loaded->first);
  stamps_ = std::move(loaded->second);
  return true;
}

}  // namespace dpconsent
