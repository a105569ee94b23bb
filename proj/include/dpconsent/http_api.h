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

#ifndef DPCONSENT_HTTP_API_H_
#define DPCONSENT_HTTP_API_H_

#include "absl/status/status.h"
#include "dpconsent/service.h"
#include "httplib.h"
#include "json.hpp"

namespace dpconsent {

// Status code -> HTTP status: InvalidArgument/OutOfRange 400,
// Unauthenticated 401, PermissionDenied 403, NotFound 404,
// FailedPrecondition 409, anything else 500.
int HttpStatusFor(const absl::Status& status);

// {"error": {"status": "FAILED_PRECONDITION", "message": "..."}}
nlohmann::json ErrorJson(const absl::Status& status);

// Routes (JSON bodies unless noted):
//   GET  /health
//   GET  /concerns
//   GET  /designs
//   GET  /designs/{id}/payload?seed=&presentation=&selection=1,2
//   GET  /client/mechanisms
//   POST /sessions                      {"scenario": "SalaryNumeric"}
//   GET  /sessions/{id}
//   POST /sessions/{id}/concerns        {"selection": [1, 5]}
//   GET  /sessions/{id}/notification
//   POST /sessions/{id}/consent         {"decision": "granted"}
//   POST /sessions/{id}/data            {"value": ..., "perturbed": true}
//   POST /sessions/{id}/ratings         {"item", "score", "design_id"}
//   GET  /export?scenario=&dp_level=&state=&include_protected=true
//        Authorization: Bearer <token>; body is JSON lines.
//   POST /queries                       {"scenario", "kind", "epsilon"?}
//        Authorization: Bearer <token>.
// The service must outlive the server.
void RegisterRoutes(httplib::Server& server, PipelineService& service);

}  // namespace dpconsent

#endif  // DPCONSENT_HTTP_API_H_
