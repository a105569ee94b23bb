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

#ifndef DPCONSENT_TESTS_TESTING_FIXTURES_H_
#define DPCONSENT_TESTS_TESTING_FIXTURES_H_

#include <filesystem>
#include <memory>
#include <string>

#include "dpconsent/config.h"
#include "dpconsent/design_registry.h"
#include "dpconsent/service.h"
#include "dpconsent/text_templates.h"

namespace dpconsent::testing {

std::filesystem::path DataDir();

// Shipped manifest and templates; aborts the test binary if they fail to
// load, since nothing else can run without them.
const DesignRegistry& ShippedRegistry();
const TemplateStore& ShippedTemplates();

// Defaults with a fixed seed and an operator token.
ServiceConfig TestConfig();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::unique_ptr<PipelineService> MakeService(
    const ServiceConfig& config, ServiceOptions options = {});

std::string ReadFile(const std::filesystem::path& path);

}  // namespace dpconsent::testing

#endif  // DPCONSENT_TESTS_TESTING_FIXTURES_H_
