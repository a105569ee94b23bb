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

// dpconsent: command-line front end. Every verb writes one JSON record per
// line to stdout; errors go to stderr as JSON with a non-zero exit code.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dpconsent/budget_ledger.h"
#include "dpconsent/central_query.h"
#include "dpconsent/concern.h"
#include "dpconsent/config.h"
#include "dpconsent/design_payloads.h"
#include "dpconsent/design_registry.h"
#include "dpconsent/dp_verifier.h"
#include "dpconsent/http_api.h"
#include "dpconsent/mechanisms.h"
#include "dpconsent/random.h"
#include "dpconsent/service.h"
#include "dpconsent/text_templates.h"

namespace dpconsent {
namespace {

struct CommonOptions {
  std::string config_path;
  std::string data_dir;
  std::optional<double> epsilon;
  std::optional<uint64_t> seed;
};

void Emit(const nlohmann::json& j) { std::cout << j.dump() << '\n'; }

int Fail(const absl::Status& s) {
  std::cerr << ErrorJson(s).dump() << '\n';
  return 1;
}

absl::StatusOr<ServiceConfig> LoadConfig(const CommonOptions& o) {
  ServiceConfig c;
  if (!o.config_path.empty()) {
    absl::StatusOr<ServiceConfig> loaded = LoadConfigFile(o.config_path);
    if (!loaded.ok()) return loaded.status();
    c = std::move(*loaded);
  }
  if (!o.data_dir.empty()) c.data_dir = o.data_dir;
  if (o.seed) c.seed = o.seed;
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

// Reads one data value per line: a bare JSON number or string, or an object
// with a "value" field (for example a perturb-* record).
absl::StatusOr<std::vector<DataValue>> ReadValues(std::istream& in) {
  std::vector<DataValue> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      // Unquoted cell names are accepted too.
      j = std::string(absl::StripAsciiWhitespace(line));
    }
    if (j.is_object()) {
      if (j.contains("value")) {
        j = j["value"];
      } else if (j.contains("output_value")) {
        j = j["output_value"];
      }
    }
    absl::StatusOr<DataValue> v = DataValueFromJson(j);
    if (!v.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", lineno, ": ", v.status().message()));
    }
    values.push_back(std::move(*v));
  }
  return values;
}

struct PerturbNumericOptions {
  std::vector<double> values;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> sensitivity;
  int count = 1;
  bool limit = false;
};

int RunPerturbNumeric(const CommonOptions& common,
                      const PerturbNumericOptions& o) {
  absl::StatusOr<ServiceConfig> config = LoadConfig(common);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<NumericDomain> domain = NumericDomain::Create(
      o.lo.value_or(config->salary_lo), o.hi.value_or(config->salary_hi),
      config->salary_units);
  if (!domain.ok()) return Fail(domain.status());
  const double sensitivity = o.sensitivity.value_or(domain->width());
  absl::StatusOr<MechanismParams> params =
      o.limit ? MechanismParams::NoPrivacyLimit(sensitivity, *domain)
              : MechanismParams::Create(
                    common.epsilon.value_or(config->local_epsilon),
                    sensitivity, *domain);
  if (!params.ok()) return Fail(params.status());

  std::vector<DataValue> inputs(o.values.begin(), o.values.end());
  if (inputs.empty()) {
    absl::StatusOr<std::vector<DataValue>> read = ReadValues(std::cin);
    if (!read.ok()) return Fail(read.status());
    inputs = std::move(*read);
  }
  Rng rng = Rng::FromOptionalSeed(config->seed);
  for (const DataValue& v : inputs) {
    const double* x = std::get_if<double>(&v);
    if (x == nullptr) {
      return Fail(absl::InvalidArgumentError(
          "malformed input: perturb-numeric needs numbers"));
    }
    for (int i = 0; i < o.count; ++i) {
      absl::StatusOr<NoiseSample> s = LaplacePerturb(*x, *params, rng);
      if (!s.ok()) return Fail(s.status());
      s->seed = config->seed;
      nlohmann::json j = NoiseSampleJson(*s);
      j["epsilon"] = o.limit ? nlohmann::json("inf")
                             : nlohmann::json(params->epsilon());
      j["scale"] = params->laplace_scale();
      Emit(j);
    }
  }
  return 0;
}

struct PerturbCellOptions {
  std::vector<std::string> cells_in;
  std::vector<std::string> grid;
  int count = 1;
  bool limit = false;
};

int RunPerturbCell(const CommonOptions& common, const PerturbCellOptions& o) {
  absl::StatusOr<ServiceConfig> config = LoadConfig(common);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<CellGrid> grid =
      CellGrid::Create(o.grid.empty() ? config->grid_cells : o.grid);
  if (!grid.ok()) return Fail(grid.status());
  absl::StatusOr<MechanismParams> params =
      o.limit ? MechanismParams::NoPrivacyLimit(1.0, *grid)
              : MechanismParams::Create(
                    common.epsilon.value_or(config->local_epsilon), 1.0,
                    *grid);
  if (!params.ok()) return Fail(params.status());

  std::vector<DataValue> inputs(o.cells_in.begin(), o.cells_in.end());
  if (inputs.empty()) {
    absl::StatusOr<std::vector<DataValue>> read = ReadValues(std::cin);
    if (!read.ok()) return Fail(read.status());
    inputs = std::move(*read);
  }
  Rng rng = Rng::FromOptionalSeed(config->seed);
  for (const DataValue& v : inputs) {
    const std::string* cell = std::get_if<std::string>(&v);
    if (cell == nullptr) {
      return Fail(absl::InvalidArgumentError(
          "malformed input: perturb-cell needs cell names"));
    }
    for (int i = 0; i < o.count; ++i) {
      absl::StatusOr<NoiseSample> s = RrPerturb(*cell, *params, rng);
      if (!s.ok()) return Fail(s.status());
      s->seed = config->seed;
      nlohmann::json j = NoiseSampleJson(*s);
      j["epsilon"] = o.limit ? nlohmann::json("inf")
                             : nlohmann::json(params->epsilon());
      Emit(j);
    }
  }
  return 0;
}

struct AnswerQueryOptions {
  std::string kind;
  std::string scenario = "SalaryNumeric";
  std::string input;
  std::optional<double> budget;
  std::optional<int> bins;
  std::string query_id = "cli";
  int repeat = 1;
  bool limit = false;
};

int RunAnswerQuery(const CommonOptions& common, const AnswerQueryOptions& o) {
  absl::StatusOr<ServiceConfig> config = LoadConfig(common);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<QueryKind> kind = ParseQueryKind(o.kind);
  if (!kind.ok()) return Fail(kind.status());
  absl::StatusOr<ScenarioKind> scenario_kind = ParseScenario(o.scenario);
  if (!scenario_kind.ok()) return Fail(scenario_kind.status());
  absl::StatusOr<Scenario> scenario = config->ScenarioFor(*scenario_kind);
  if (!scenario.ok()) return Fail(scenario.status());

  absl::StatusOr<std::vector<DataValue>> dataset;
  if (o.input.empty() || o.input == "-") {
    dataset = ReadValues(std::cin);
  } else {
    std::ifstream in(o.input);
    if (!in) {
      return Fail(absl::NotFoundError(absl::StrCat("cannot open ", o.input)));
    }
    dataset = ReadValues(in);
  }
  if (!dataset.ok()) return Fail(dataset.status());

  absl::StatusOr<MechanismParams> params =
      o.limit ? MechanismParams::NoPrivacyLimit(1.0, scenario->domain())
              : MechanismParams::Create(
                    common.epsilon.value_or(config->central_epsilon), 1.0,
                    scenario->domain());
  if (!params.ok()) return Fail(params.status());
  absl::StatusOr<BudgetLedger> ledger =
      o.limit ? BudgetLedger::Unlimited()
              : BudgetLedger::Create(o.budget.value_or(config->total_budget));
  if (!ledger.ok()) return Fail(ledger.status());

  Rng rng = Rng::FromOptionalSeed(config->seed);
  CentralQueryOptions qo;
  qo.numeric_bins = o.bins.value_or(config->histogram_bins);
  for (int i = 0; i < o.repeat; ++i) {
    qo.query_id = o.repeat == 1 ? o.query_id : absl::StrCat(o.query_id, "-", i);
    absl::StatusOr<CentralAnswer> a =
        CentralAnswerQuery(*dataset, *kind, *params, *ledger, rng, qo);
    if (!a.ok()) return Fail(a.status());
    a->seed = config->seed;
    nlohmann::json j = CentralAnswerJson(*a);
    j["remaining_budget"] = ledger->remaining();
    Emit(j);
  }
  return 0;
}

struct VerifyOptions {
  std::string mechanism = "rr";
  int k = 2;
  std::optional<double> claimed;
  double sensitivity = 1.0;
};

int RunVerify(const CommonOptions& common, const VerifyOptions& o) {
  const double eps = common.epsilon.value_or(1.0);
  MechanismHandle handle;
  if (o.mechanism == "rr") {
    absl::StatusOr<TransitionMatrix> m =
        RandomizedResponseMatrix(o.k, o.claimed.value_or(eps));
    if (!m.ok()) return Fail(m.status());
    handle = std::move(*m);
  } else if (o.mechanism == "identity") {
    handle = IdentityMatrix(o.k);
  } else if (o.mechanism == "laplace") {
    handle = LaplaceHandle{o.sensitivity, o.claimed.value_or(eps)};
  } else {
    return Fail(absl::UnimplementedError(absl::StrCat(
        "unsupported mechanism '", o.mechanism,
        "' (expected rr, identity or laplace)")));
  }
  // --claimed-epsilon builds the mechanism at one epsilon and checks it
  // against --epsilon.
  absl::StatusOr<VerificationReport> r = VerifyDpBound(handle, eps);
  if (!r.ok()) return Fail(r.status());
  Emit(VerificationReportJson(*r));
  return 0;
}

struct GenOptions {
  std::string design_id;
  std::optional<uint64_t> payload_seed;
  std::string presentation;
  std::string selection;
  std::optional<int> trials;
};

int RunGenIllustration(const CommonOptions& common, const GenOptions& o) {
  absl::StatusOr<ServiceConfig> config = LoadConfig(common);
  if (!config.ok()) return Fail(config.status());
  if (common.epsilon) {
    config->local_epsilon = *common.epsilon;
    config->central_epsilon = *common.epsilon;
  }
  const std::filesystem::path dir = config->ResolvedDataDir();
  absl::StatusOr<DesignRegistry> registry =
      DesignRegistry::LoadFile(dir / "designs.json");
  if (!registry.ok()) return Fail(registry.status());
  absl::StatusOr<std::unique_ptr<TemplateStore>> templates =
      TemplateStore::LoadDirectory(dir / "templates");
  if (!templates.ok()) return Fail(templates.status());
  absl::StatusOr<IllustrationEngine> engine =
      IllustrationEngine::Create(*config, templates->get());
  if (!engine.ok()) return Fail(engine.status());

  const DesignDescriptor* found = registry->Find(o.design_id);
  if (found == nullptr) {
    return Fail(absl::NotFoundError(
        absl::StrCat("unknown design '", o.design_id, "'")));
  }
  DesignDescriptor design = *found;
  if (o.trials) {
    if (*o.trials < 1) {
      return Fail(absl::InvalidArgumentError("--trials must be >= 1"));
    }
    design.trial_count = *o.trials;
  }
  PayloadRequest req;
  req.seed = o.payload_seed.value_or(config->seed.value_or(EntropySeed()));
  if (!o.presentation.empty()) {
    absl::StatusOr<CellPresentation> p = ParseCellPresentation(o.presentation);
    if (!p.ok()) return Fail(p.status());
    req.presentation = *p;
  }
  if (!o.selection.empty()) {
    std::vector<int> ids;
    for (absl::string_view part :
         absl::StrSplit(o.selection, ',', absl::SkipWhitespace())) {
      int id;
      if (!absl::SimpleAtoi(part, &id)) {
        return Fail(absl::InvalidArgumentError(
            absl::StrCat("malformed selection: '", part, "'")));
      }
      ids.push_back(id);
    }
    absl::StatusOr<ConcernSet> sel = ConcernSet::FromIds(ids);
    if (!sel.ok()) return Fail(sel.status());
    req.selection = *sel;
  }
  absl::StatusOr<nlohmann::json> env = engine->Generate(design, req);
  if (!env.ok()) return Fail(env.status());
  Emit(*env);
  return 0;
}

int RunDesigns(const CommonOptions& common) {
  absl::StatusOr<ServiceConfig> config = LoadConfig(common);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<DesignRegistry> registry =
      DesignRegistry::LoadFile(config->ResolvedDataDir() / "designs.json");
  if (!registry.ok()) return Fail(registry.status());
  for (const DesignDescriptor& d : registry->designs()) {
    Emit(DesignDescriptorJson(d));
  }
  return 0;
}

int RunMatch(const std::vector<int>& ids) {
  absl::StatusOr<DpLevel> level = MatchDpLevel(ids);
  if (!level.ok()) return Fail(level.status());
  Emit({{"selection", ids}, {"dp_level", DpLevelName(*level)}});
  return 0;
}

httplib::Server* g_server = nullptr;

void StopServer(int) {
  if (g_server != nullptr) g_server->stop();
}

int RunServe(const CommonOptions& common, std::optional<int> port,
             const std::string& bind) {
  absl::StatusOr<ServiceConfig> config = LoadConfig(common);
  if (!config.ok()) return Fail(config.status());
  if (common.epsilon) {
    config->local_epsilon = *common.epsilon;
    config->central_epsilon = *common.epsilon;
  }
  if (port) config->port = *port;
  if (!bind.empty()) config->bind_address = bind;
  const std::filesystem::path dir = config->ResolvedDataDir();
  absl::StatusOr<DesignRegistry> registry =
      DesignRegistry::LoadFile(dir / "designs.json");
  if (!registry.ok()) return Fail(registry.status());
  absl::StatusOr<std::unique_ptr<TemplateStore>> templates =
      TemplateStore::LoadDirectory(dir / "templates");
  if (!templates.ok()) return Fail(templates.status());
  absl::StatusOr<std::unique_ptr<PipelineService>> service =
      PipelineService::Create(*config, &*registry, templates->get());
  if (!service.ok()) return Fail(service.status());

  httplib::Server server;
  RegisterRoutes(server, **service);
  g_server = &server;
  std::signal(SIGINT, StopServer);
  std::signal(SIGTERM, StopServer);
  if (!server.bind_to_port(config->bind_address, config->port)) {
    return Fail(absl::UnavailableError(absl::StrCat(
        "cannot bind ", config->bind_address, ":", config->port)));
  }
  Emit({{"event", "listening"},
        {"address", config->bind_address},
        {"port", config->port},
        {"storage", config->storage_path.empty() ? "memory"
                                                 : config->storage_path}});
  std::cout.flush();
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Differential-privacy consent pipeline tools"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonOptions common;
  app.add_option("--config", common.config_path, "JSON configuration file");
  app.add_option("--data-dir", common.data_dir,
                 "Directory holding designs.json and templates/");
  app.add_option("--epsilon", common.epsilon, "Privacy parameter");
  app.add_option("--seed", common.seed, "Fixed generator seed");

  app.add_subcommand("concerns", "Print the concern catalog");
  app.add_subcommand("designs", "List the design registry, one per line");

  std::vector<int> match_ids;
  CLI::App* match = app.add_subcommand(
      "match", "Map a concern selection to a DP level");
  match->add_option("ids", match_ids, "Concern ids 1..7");

  PerturbNumericOptions pn;
  CLI::App* perturb_numeric = app.add_subcommand(
      "perturb-numeric", "Laplace-perturb numbers (flags or stdin lines)");
  perturb_numeric->add_option("--value", pn.values, "Input value(s)");
  perturb_numeric->add_option("--lo", pn.lo, "Clamp lower bound");
  perturb_numeric->add_option("--hi", pn.hi, "Clamp upper bound");
  perturb_numeric->add_option("--sensitivity", pn.sensitivity,
                              "Defaults to hi - lo");
  perturb_numeric->add_option("--count", pn.count, "Draws per input")
      ->check(CLI::PositiveNumber);
  perturb_numeric->add_flag("--no-privacy-limit", pn.limit,
                            "epsilon = inf test mode (no noise)");

  PerturbCellOptions pc;
  CLI::App* perturb_cell = app.add_subcommand(
      "perturb-cell", "Randomized response over a cell grid");
  perturb_cell->add_option("--cell", pc.cells_in, "True cell(s)");
  perturb_cell->add_option("--cells", pc.grid, "Grid cells")->delimiter(',');
  perturb_cell->add_option("--count", pc.count, "Draws per input")
      ->check(CLI::PositiveNumber);
  perturb_cell->add_flag("--no-privacy-limit", pc.limit,
                         "epsilon = inf test mode (output = input)");

  AnswerQueryOptions aq;
  CLI::App* answer = app.add_subcommand(
      "answer-query", "Noisy count/mean/histogram over JSON-lines records");
  answer->add_option("--kind", aq.kind, "count | mean | histogram")
      ->required();
  answer->add_option("--scenario", aq.scenario,
                     "SalaryNumeric | LocationGeo");
  answer->add_option("--input", aq.input, "Records file; '-' for stdin");
  answer->add_option("--budget", aq.budget, "Total epsilon for the ledger");
  answer->add_option("--bins", aq.bins, "Numeric histogram bins");
  answer->add_option("--query-id", aq.query_id, "Ledger entry name");
  answer->add_option("--repeat", aq.repeat, "Ask the query this many times")
      ->check(CLI::PositiveNumber);
  answer->add_flag("--no-privacy-limit", aq.limit,
                   "epsilon = inf test mode (exact answers)");

  VerifyOptions vo;
  CLI::App* verify = app.add_subcommand(
      "verify-dp", "Check the epsilon-DP inequality for a mechanism");
  verify->add_option("--mechanism", vo.mechanism, "rr | identity | laplace");
  verify->add_option("--k", vo.k, "Domain size for rr/identity");
  verify->add_option("--claimed-epsilon", vo.claimed,
                     "Build the mechanism at this epsilon instead");
  verify->add_option("--sensitivity", vo.sensitivity, "Laplace sensitivity");

  GenOptions go;
  CLI::App* gen = app.add_subcommand("gen-illustration",
                                     "Emit one design payload envelope");
  gen->add_option("--design-id", go.design_id, "Registry design id")
      ->required();
  gen->add_option("--payload-seed", go.payload_seed,
                  "Payload seed (defaults to --seed, then entropy)");
  gen->add_option("--presentation", go.presentation, "table | pie | map");
  gen->add_option("--selection", go.selection,
                  "Concern ids for text designs, e.g. 1,3");
  gen->add_option("--trials", go.trials, "Override the repeated-trial count");

  std::optional<int> serve_port;
  std::string serve_bind;
  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", serve_port, "Listen port");
  serve->add_option("--bind", serve_bind, "Bind address");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("concerns")) {
    Emit(ConcernCatalogJson());
    return 0;
  }
  if (app.got_subcommand("designs")) return RunDesigns(common);
  if (match->parsed()) return RunMatch(match_ids);
  if (perturb_numeric->parsed()) return RunPerturbNumeric(common, pn);
  if (perturb_cell->parsed()) return RunPerturbCell(common, pc);
  if (answer->parsed()) return RunAnswerQuery(common, aq);
  if (verify->parsed()) return RunVerify(common, vo);
  if (gen->parsed()) return RunGenIllustration(common, go);
  if (serve->parsed()) return RunServe(common, serve_port, serve_bind);
  return 2;
}

}  // namespace
}  // namespace dpconsent

int main(int argc, char** argv) { return dpconsent::Main(argc, argv); }
