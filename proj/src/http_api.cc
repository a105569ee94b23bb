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

#include "dpconsent/http_api.h"

#include <string>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dpconsent/concern.h"

namespace dpconsent {
namespace {

constexpr char kJson[] = "application/json";

void SendJson(httplib::Response& res, int code, const nlohmann::json& body) {
  res.status = code;
  res.set_content(body.dump(), kJson);
}

void SendError(httplib::Response& res, const absl::Status& status) {
  SendJson(res, HttpStatusFor(status), ErrorJson(status));
}

absl::StatusOr<nlohmann::json> ParseBody(const httplib::Request& req) {
  nlohmann::json j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        "malformed input: request body must be a JSON object");
  }
  return j;
}

absl::StatusOr<std::string> StringField(const nlohmann::json& j,
                                        const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed input: '", key, "' must be a string"));
  }
  return j[key].get<std::string>();
}

std::string BearerToken(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr absl::string_view kPrefix = "Bearer ";
  if (!absl::StartsWith(header, kPrefix)) return "";
  return header.substr(kPrefix.size());
}

absl::StatusOr<std::vector<int>> ParseIdList(absl::string_view text) {
  std::vector<int> ids;
  for (absl::string_view part :
       absl::StrSplit(text, ',', absl::SkipWhitespace())) {
    int id;
    if (!absl::SimpleAtoi(part, &id)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed selection: '", part, "'"));
    }
    ids.push_back(id);
  }
  return ids;
}

absl::StatusOr<ExportFilter> ParseExportFilter(const httplib::Request& req,
                                               bool& include_protected) {
  ExportFilter f;
  if (req.has_param("scenario")) {
    absl::StatusOr<ScenarioKind> s =
        ParseScenario(req.get_param_value("scenario"));
    if (!s.ok()) return s.status();
    f.scenario = *s;
  }
  if (req.has_param("dp_level")) {
    absl::StatusOr<DpLevel> l = ParseDpLevel(req.get_param_value("dp_level"));
    if (!l.ok()) return l.status();
    f.dp_level = *l;
  }
  if (req.has_param("state")) {
    absl::StatusOr<SessionState> s =
        ParseSessionState(req.get_param_value("state"));
    if (!s.ok()) return s.status();
    f.state = *s;
  }
  include_protected = false;
  if (req.has_param("include_protected")) {
    const std::string v =
        absl::AsciiStrToLower(req.get_param_value("include_protected"));
    include_protected = v == "1" || v == "true";
  }
  return f;
}

// Wraps a handler so every failure becomes a JSON error body.
template <typename Fn>
httplib::Server::Handler Handle(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    absl::Status s = fn(req, res);
    if (!s.ok()) SendError(res, s);
  };
}

}  // namespace

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return 400;
    case absl::StatusCode::kUnauthenticated:
      return 401;
    case absl::StatusCode::kPermissionDenied:
      return 403;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kFailedPrecondition:
      return 409;
    default:
      return 500;
  }
}

nlohmann::json ErrorJson(const absl::Status& status) {
  return {{"error",
           {{"status", absl::StatusCodeToString(status.code())},
            {"message", std::string(status.message())}}}};
}

void RegisterRoutes(httplib::Server& server, PipelineService& service) {
  PipelineService* svc = &service;

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers",
                   "Content-Type, Authorization");
    res.status = 204;
  });

  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, {{"status", "ok"}});
  });

  server.Get("/concerns", [](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, ConcernCatalogJson());
  });

  server.Get("/designs",
             [svc](const httplib::Request&, httplib::Response& res) {
               SendJson(res, 200, svc->registry().ToJson());
             });

  server.Get("/client/mechanisms",
             [svc](const httplib::Request&, httplib::Response& res) {
               SendJson(res, 200, svc->ClientMechanismJson());
             });

  server.Get(
      R"(/designs/([^/]+)/payload)",
      Handle([svc](const httplib::Request& req,
                   httplib::Response& res) -> absl::Status {
        const DesignDescriptor* d = svc->registry().Find(req.matches[1].str());
        if (d == nullptr) {
          return absl::NotFoundError(
              absl::StrCat("unknown design '", req.matches[1].str(), "'"));
        }
        PayloadRequest pr;
        if (req.has_param("seed")) {
          if (!absl::SimpleAtoi(req.get_param_value("seed"), &pr.seed)) {
            return absl::InvalidArgumentError(
                "malformed input: seed must be a non-negative integer");
          }
        } else {
          pr.seed = svc->NextSeed();
        }
        if (req.has_param("presentation")) {
          absl::StatusOr<CellPresentation> p =
              ParseCellPresentation(req.get_param_value("presentation"));
          if (!p.ok()) return p.status();
          pr.presentation = *p;
        }
        if (req.has_param("selection")) {
          absl::StatusOr<std::vector<int>> ids =
              ParseIdList(req.get_param_value("selection"));
          if (!ids.ok()) return ids.status();
          absl::StatusOr<ConcernSet> sel = ConcernSet::FromIds(*ids);
          if (!sel.ok()) return sel.status();
          pr.selection = *sel;
        }
        absl::StatusOr<nlohmann::json> env = svc->engine().Generate(*d, pr);
        if (!env.ok()) return env.status();
        SendJson(res, 200, *env);
        return absl::OkStatus();
      }));

  server.Post("/sessions",
              Handle([svc](const httplib::Request& req,
                           httplib::Response& res) -> absl::Status {
                absl::StatusOr<nlohmann::json> body = ParseBody(req);
                if (!body.ok()) return body.status();
                absl::StatusOr<std::string> scenario =
                    StringField(*body, "scenario");
                if (!scenario.ok()) return scenario.status();
                absl::StatusOr<SessionRecord> r =
                    svc->CreateSession(*scenario);
                if (!r.ok()) return r.status();
                SendJson(res, 201, SessionRecordJson(*r));
                return absl::OkStatus();
              }));

  server.Get(R"(/sessions/([^/]+))",
             Handle([svc](const httplib::Request& req,
                          httplib::Response& res) -> absl::Status {
               absl::StatusOr<SessionRecord> r =
                   svc->GetSession(req.matches[1].str());
               if (!r.ok()) return r.status();
               SendJson(res, 200, SessionRecordJson(*r));
               return absl::OkStatus();
             }));

  server.Post(
      R"(/sessions/([^/]+)/concerns)",
      Handle([svc](const httplib::Request& req,
                   httplib::Response& res) -> absl::Status {
        absl::StatusOr<nlohmann::json> body = ParseBody(req);
        if (!body.ok()) return body.status();
        const nlohmann::json& sel = (*body)["selection"];
        if (!sel.is_array()) {
          return absl::InvalidArgumentError(
              "malformed selection: 'selection' must be an array of ids");
        }
        std::vector<int> ids;
        for (const nlohmann::json& id : sel) {
          if (!id.is_number_integer()) {
            return absl::InvalidArgumentError(
                "malformed selection: concern ids must be integers");
          }
          ids.push_back(id.get<int>());
        }
        absl::StatusOr<SessionRecord> r =
            svc->SubmitConcerns(req.matches[1].str(), ids);
        if (!r.ok()) return r.status();
        SendJson(res, 200, SessionRecordJson(*r));
        return absl::OkStatus();
      }));

  server.Get(R"(/sessions/([^/]+)/notification)",
             Handle([svc](const httplib::Request& req,
                          httplib::Response& res) -> absl::Status {
               absl::StatusOr<std::string> bundle =
                   svc->GetNotification(req.matches[1].str());
               if (!bundle.ok()) return bundle.status();
               res.status = 200;
               res.set_content(*bundle, kJson);
               return absl::OkStatus();
             }));

  server.Post(R"(/sessions/([^/]+)/consent)",
              Handle([svc](const httplib::Request& req,
                           httplib::Response& res) -> absl::Status {
                absl::StatusOr<nlohmann::json> body = ParseBody(req);
                if (!body.ok()) return body.status();
                absl::StatusOr<std::string> d = StringField(*body, "decision");
                if (!d.ok()) return d.status();
                absl::StatusOr<ConsentDecision> decision =
                    ParseConsentDecision(*d);
                if (!decision.ok()) return decision.status();
                absl::StatusOr<SessionRecord> r =
                    svc->SubmitConsent(req.matches[1].str(), *decision);
                if (!r.ok()) return r.status();
                SendJson(res, 200, SessionRecordJson(*r));
                return absl::OkStatus();
              }));

  server.Post(R"(/sessions/([^/]+)/data)",
              Handle([svc](const httplib::Request& req,
                           httplib::Response& res) -> absl::Status {
                absl::StatusOr<nlohmann::json> body = ParseBody(req);
                if (!body.ok()) return body.status();
                absl::StatusOr<DataSubmission> data =
                    DataSubmissionFromJson(*body);
                if (!data.ok()) return data.status();
                absl::StatusOr<SessionRecord> r =
                    svc->SubmitData(req.matches[1].str(), *data);
                if (!r.ok()) return r.status();
                SendJson(res, 200, SessionRecordJson(*r));
                return absl::OkStatus();
              }));

  server.Post(
      R"(/sessions/([^/]+)/ratings)",
      Handle([svc](const httplib::Request& req,
                   httplib::Response& res) -> absl::Status {
        absl::StatusOr<nlohmann::json> body = ParseBody(req);
        if (!body.ok()) return body.status();
        absl::StatusOr<std::string> item_name = StringField(*body, "item");
        if (!item_name.ok()) return item_name.status();
        absl::StatusOr<LikertItem> item = ParseLikertItem(*item_name);
        if (!item.ok()) return item.status();
        if (!body->contains("score") || !(*body)["score"].is_number_integer()) {
          return absl::InvalidArgumentError(
              "malformed input: 'score' must be an integer");
        }
        absl::StatusOr<std::string> design = StringField(*body, "design_id");
        if (!design.ok()) return design.status();
        absl::StatusOr<SessionRecord> r = svc->SubmitRating(
            req.matches[1].str(), *item, (*body)["score"].get<int>(), *design);
        if (!r.ok()) return r.status();
        SendJson(res, 200, SessionRecordJson(*r));
        return absl::OkStatus();
      }));

  server.Get("/export",
             Handle([svc](const httplib::Request& req,
                          httplib::Response& res) -> absl::Status {
               bool include_protected = false;
               absl::StatusOr<ExportFilter> filter =
                   ParseExportFilter(req, include_protected);
               if (!filter.ok()) return filter.status();
               absl::StatusOr<std::vector<nlohmann::json>> records =
                   svc->ExportRecords(*filter, BearerToken(req),
                                      include_protected);
               if (!records.ok()) return records.status();
               std::string body;
               for (const nlohmann::json& r : *records) {
                 absl::StrAppend(&body, r.dump(), "\n");
               }
               res.status = 200;
               res.set_content(body, "application/x-ndjson");
               return absl::OkStatus();
             }));

  server.Post(
      "/queries",
      Handle([svc](const httplib::Request& req,
                   httplib::Response& res) -> absl::Status {
        absl::StatusOr<nlohmann::json> body = ParseBody(req);
        if (!body.ok()) return body.status();
        absl::StatusOr<std::string> scenario_name =
            StringField(*body, "scenario");
        if (!scenario_name.ok()) return scenario_name.status();
        absl::StatusOr<std::string> kind_name = StringField(*body, "kind");
        if (!kind_name.ok()) return kind_name.status();
        absl::StatusOr<ScenarioKind> scenario = ParseScenario(*scenario_name);
        if (!scenario.ok()) return scenario.status();
        absl::StatusOr<QueryKind> kind = ParseQueryKind(*kind_name);
        if (!kind.ok()) return kind.status();
        ProtectedQuery q{*scenario, *kind, std::nullopt, ""};
        if (body->contains("epsilon")) {
          if (!(*body)["epsilon"].is_number()) {
            return absl::InvalidArgumentError(
                "malformed input: 'epsilon' must be a number");
          }
          q.epsilon = (*body)["epsilon"].get<double>();
        }
        if (body->contains("query_id")) {
          absl::StatusOr<std::string> qid = StringField(*body, "query_id");
          if (!qid.ok()) return qid.status();
          q.query_id = *qid;
        }
        absl::StatusOr<ProtectedQueryResult> r =
            svc->AnswerQuery(q, BearerToken(req));
        if (!r.ok()) return r.status();
        SendJson(res, 200, ProtectedQueryResultJson(*r));
        return absl::OkStatus();
      }));
}

}  // namespace dpconsent
