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

#include "dpconsent/design_registry.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpconsent {
namespace {

absl::Status LoadError(absl::string_view message) {
  return absl::FailedPreconditionError(
      absl::StrCat("registry load error: ", message));
}

absl::StatusOr<std::string> StringField(const nlohmann::json& j,
                                        absl::string_view key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    return LoadError(absl::StrCat("field '", key, "' missing or not a string"));
  }
  return it->get<std::string>();
}

// Generator/category/scenario/level compatibility.
absl::Status CheckGenerator(const DesignDescriptor& d) {
  bool ok = false;
  switch (d.generator) {
    case PayloadGenerator::kText:
      ok = d.category == DesignCategory::kText;
      break;
    case PayloadGenerator::kRepeatedTrials:
      ok = d.category == DesignCategory::kInputOutput &&
           d.dp_level == DpLevel::kLocal;
      break;
    case PayloadGenerator::kDataDistribution:
      ok = d.category == DesignCategory::kInputOutput &&
           d.dp_level == DpLevel::kCentral;
      break;
    case PayloadGenerator::kDotplot:
      // Local location data is categorical; there is no density to plot.
      ok = d.category == DesignCategory::kProbDist &&
           (d.scenario == ScenarioKind::kSalaryNumeric ||
            d.dp_level == DpLevel::kCentral);
      break;
    case PayloadGenerator::kCellProbs:
      ok = d.category == DesignCategory::kProbDist &&
           d.scenario == ScenarioKind::kLocationGeo &&
           d.dp_level == DpLevel::kLocal;
      break;
    case PayloadGenerator::kStoryboard:
      ok = d.category == DesignCategory::kStoryboard;
      break;
  }
  if (!ok) {
    return LoadError(absl::StrCat("design '", d.design_id, "': generator ",
                                  PayloadGeneratorName(d.generator),
                                  " does not fit ", ScenarioName(d.scenario),
                                  "/", DpLevelName(d.dp_level), "/",
                                  DesignCategoryName(d.category)));
  }
  if (d.presentation.has_value() &&
      d.generator != PayloadGenerator::kCellProbs) {
    return LoadError(absl::StrCat("design '", d.design_id,
                                  "': presentation only applies to cell "
                                  "probabilities"));
  }
  if (d.trial_count.has_value() &&
      (d.generator != PayloadGenerator::kRepeatedTrials ||
       *d.trial_count < 1)) {
    return LoadError(absl::StrCat("design '", d.design_id,
                                  "': invalid trial_count"));
  }
  return absl::OkStatus();
}

absl::StatusOr<DesignDescriptor> ParseDescriptor(const nlohmann::json& j) {
  if (!j.is_object()) return LoadError("design entry is not an object");
  DesignDescriptor d;
  absl::StatusOr<std::string> id = StringField(j, "design_id");
  if (!id.ok()) return id.status();
  d.design_id = *id;

  absl::StatusOr<std::string> s = StringField(j, "scenario");
  if (!s.ok()) return s.status();
  absl::StatusOr<ScenarioKind> scenario = ParseScenario(*s);
  if (!scenario.ok()) return LoadError(scenario.status().message());
  d.scenario = *scenario;

  absl::StatusOr<std::string> l = StringField(j, "dp_level");
  if (!l.ok()) return l.status();
  absl::StatusOr<DpLevel> level = ParseDpLevel(*l);
  if (!level.ok()) return LoadError(level.status().message());
  d.dp_level = *level;

  absl::StatusOr<std::string> c = StringField(j, "category");
  if (!c.ok()) return c.status();
  absl::StatusOr<DesignCategory> category = ParseDesignCategory(*c);
  if (!category.ok()) return LoadError(category.status().message());
  d.category = *category;

  absl::StatusOr<std::string> title = StringField(j, "title");
  if (!title.ok()) return title.status();
  d.title = *title;

  absl::StatusOr<std::string> g = StringField(j, "generator");
  if (!g.ok()) return g.status();
  absl::StatusOr<PayloadGenerator> generator = ParsePayloadGenerator(*g);
  if (!generator.ok()) return LoadError(generator.status().message());
  d.generator = *generator;

  if (auto it = j.find("presentation"); it != j.end()) {
    if (!it->is_string()) return LoadError("presentation must be a string");
    absl::StatusOr<CellPresentation> p =
        ParseCellPresentation(it->get<std::string>());
    if (!p.ok()) return LoadError(p.status().message());
    d.presentation = *p;
  }
  if (auto it = j.find("trial_count"); it != j.end()) {
    if (!it->is_number_integer()) return LoadError("trial_count not integer");
    d.trial_count = it->get<int>();
  }
  if (auto it = j.find("extra"); it != j.end()) {
    if (!it->is_boolean()) return LoadError("extra must be a boolean");
    d.extra = it->get<bool>();
  }
  if (absl::Status st = CheckGenerator(d); !st.ok()) return st;
  return d;
}

}  // namespace

absl::string_view DesignCategoryName(DesignCategory c) {
  switch (c) {
    case DesignCategory::kText:
      return "Text";
    case DesignCategory::kInputOutput:
      return "InputOutput";
    case DesignCategory::kProbDist:
      return "ProbDist";
    case DesignCategory::kStoryboard:
      return "Storyboard";
  }
  return "Text";
}

absl::StatusOr<DesignCategory> ParseDesignCategory(absl::string_view name) {
  for (DesignCategory c : kAllCategories) {
    if (DesignCategoryName(c) == name) return c;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown design category '", name, "'"));
}

absl::string_view PayloadGeneratorName(PayloadGenerator g) {
  switch (g) {
    case PayloadGenerator::kText:
      return "text";
    case PayloadGenerator::kRepeatedTrials:
      return "repeated_trials";
    case PayloadGenerator::kDataDistribution:
      return "data_distribution";
    case PayloadGenerator::kDotplot:
      return "dotplot";
    case PayloadGenerator::kCellProbs:
      return "cell_probs";
    case PayloadGenerator::kStoryboard:
      return "storyboard";
  }
  return "text";
}

absl::StatusOr<PayloadGenerator> ParsePayloadGenerator(absl::string_view name) {
  for (PayloadGenerator g :
       {PayloadGenerator::kText, PayloadGenerator::kRepeatedTrials,
        PayloadGenerator::kDataDistribution, PayloadGenerator::kDotplot,
        PayloadGenerator::kCellProbs, PayloadGenerator::kStoryboard}) {
    if (PayloadGeneratorName(g) == name) return g;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown payload generator '", name, "'"));
}

nlohmann::json DesignDescriptorJson(const DesignDescriptor& d) {
  nlohmann::json j = {{"design_id", d.design_id},
                      {"scenario", ScenarioName(d.scenario)},
                      {"dp_level", DpLevelName(d.dp_level)},
                      {"category", DesignCategoryName(d.category)},
                      {"title", d.title},
                      {"generator", PayloadGeneratorName(d.generator)},
                      {"extra", d.extra}};
  if (d.presentation.has_value()) {
    j["presentation"] = CellPresentationName(*d.presentation);
  }
  if (d.trial_count.has_value()) j["trial_count"] = *d.trial_count;
  return j;
}

absl::StatusOr<DesignRegistry> DesignRegistry::FromManifest(
    const nlohmann::json& j) {
  if (!j.is_object()) return LoadError("manifest is not an object");
  auto designs = j.find("designs");
  if (designs == j.end() || !designs->is_array()) {
    return LoadError("manifest has no 'designs' array");
  }

  DesignRegistry registry;
  std::set<std::string> ids;
  for (const nlohmann::json& entry : *designs) {
    absl::StatusOr<DesignDescriptor> d = ParseDescriptor(entry);
    if (!d.ok()) return d.status();
    if (!ids.insert(d->design_id).second) {
      return LoadError(absl::StrCat("duplicate design id '", d->design_id,
                                    "'"));
    }
    registry.designs_.push_back(std::move(*d));
  }

  if (auto absent = j.find("absent_cells"); absent != j.end()) {
    if (!absent->is_array()) return LoadError("absent_cells must be an array");
    for (const nlohmann::json& cell : *absent) {
      if (!cell.is_object()) return LoadError("absent cell is not an object");
      absl::StatusOr<std::string> s = StringField(cell, "scenario");
      absl::StatusOr<std::string> l = StringField(cell, "dp_level");
      absl::StatusOr<std::string> c = StringField(cell, "category");
      if (!s.ok() || !l.ok() || !c.ok()) return LoadError("bad absent cell");
      absl::StatusOr<ScenarioKind> sk = ParseScenario(*s);
      absl::StatusOr<DpLevel> lk = ParseDpLevel(*l);
      absl::StatusOr<DesignCategory> ck = ParseDesignCategory(*c);
      if (!sk.ok() || !lk.ok() || !ck.ok()) return LoadError("bad absent cell");
      registry.absent_.emplace_back(*sk, *lk, *ck);
    }
  }

  const int total = static_cast<int>(registry.designs_.size());
  const int salary = static_cast<int>(
      std::count_if(registry.designs_.begin(), registry.designs_.end(),
                    [](const DesignDescriptor& d) {
                      return d.scenario == ScenarioKind::kSalaryNumeric;
                    }));
  if (total != kExpectedDesigns || salary != kExpectedSalaryDesigns ||
      total - salary != kExpectedLocationDesigns) {
    return LoadError(absl::StrCat("expected ", kExpectedDesigns, " designs (",
                                  kExpectedSalaryDesigns, " salary + ",
                                  kExpectedLocationDesigns,
                                  " location), manifest has ", total, " (",
                                  salary, " + ", total - salary, ")"));
  }

  std::map<std::tuple<ScenarioKind, DpLevel, DesignCategory>, int> cells;
  for (const DesignDescriptor& d : registry.designs_) {
    ++cells[{d.scenario, d.dp_level, d.category}];
  }
  for (ScenarioKind s : kAllScenarios) {
    for (DpLevel l : {DpLevel::kLocal, DpLevel::kCentral}) {
      for (DesignCategory c : kAllCategories) {
        const bool is_absent =
            std::find(registry.absent_.begin(), registry.absent_.end(),
                      std::make_tuple(s, l, c)) != registry.absent_.end();
        const int count = cells[{s, l, c}];
        if (count == 0 && !is_absent) {
          return LoadError(absl::StrCat("design space cell ", ScenarioName(s),
                                        "/", DpLevelName(l), "/",
                                        DesignCategoryName(c),
                                        " has no design"));
        }
        if (count > 0 && is_absent) {
          return LoadError(absl::StrCat("cell ", ScenarioName(s), "/",
                                        DpLevelName(l), "/",
                                        DesignCategoryName(c),
                                        " is marked absent but has designs"));
        }
      }
    }
  }
  // Exactly the non-first design of a cell carries `extra`.
  std::map<std::tuple<ScenarioKind, DpLevel, DesignCategory>, int> seen;
  for (const DesignDescriptor& d : registry.designs_) {
    const int nth = seen[{d.scenario, d.dp_level, d.category}]++;
    if (d.extra != (nth > 0)) {
      return LoadError(absl::StrCat("design '", d.design_id, "': 'extra' must ",
                                    nth > 0 ? "be set on" : "not be set on",
                                    " this design"));
    }
  }
  return registry;
}

absl::StatusOr<DesignRegistry> DesignRegistry::LoadFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return LoadError(absl::StrCat("cannot open manifest ", path.string()));
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    return LoadError(absl::StrCat(path.string(), " is not valid JSON"));
  }
  return FromManifest(j);
}

const DesignDescriptor* DesignRegistry::Find(absl::string_view design_id) const {
  for (const DesignDescriptor& d : designs_) {
    if (d.design_id == design_id) return &d;
  }
  return nullptr;
}

std::vector<DesignDescriptor> DesignRegistry::ForScenario(
    ScenarioKind scenario) const {
  std::vector<DesignDescriptor> out;
  for (const DesignDescriptor& d : designs_) {
    if (d.scenario == scenario) out.push_back(d);
  }
  return out;
}

std::vector<DesignDescriptor> DesignRegistry::ForCell(ScenarioKind scenario,
                                                      DpLevel level) const {
  std::vector<DesignDescriptor> out;
  for (const DesignDescriptor& d : designs_) {
    if (d.scenario == scenario && d.dp_level == level) out.push_back(d);
  }
  return out;
}

nlohmann::json DesignRegistry::ToJson() const {
  nlohmann::json designs = nlohmann::json::array();
  for (const DesignDescriptor& d : designs_) {
    designs.push_back(DesignDescriptorJson(d));
  }
  nlohmann::json absent = nlohmann::json::array();
  for (const auto& [s, l, c] : absent_) {
    absent.push_back({{"scenario", ScenarioName(s)},
                      {"dp_level", DpLevelName(l)},
                      {"category", DesignCategoryName(c)}});
  }
  return {{"version", 1}, {"designs", designs}, {"absent_cells", absent}};
}

}  // namespace dpconsent
