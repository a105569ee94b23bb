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

#include "testing/fixtures.h"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

namespace dpconsent::testing {
namespace {

[[noreturn]] void Die(const absl::Status& s) {
  std::cerr << "fixture setup failed: " << s << "\n";
  std::abort();
}

}  // namespace

std::filesystem::path DataDir() { return DPCONSENT_TEST_DATA_DIR; }

const DesignRegistry& ShippedRegistry() {
  static const DesignRegistry* registry = [] {
    absl::StatusOr<DesignRegistry> r =
        DesignRegistry::LoadFile(DataDir() / "designs.json");
    if (!r.ok()) Die(r.status());
    return new DesignRegistry(*std::move(r));
  }();
  return *registry;
}

const TemplateStore& ShippedTemplates() {
  static const TemplateStore* store = [] {
    absl::StatusOr<std::unique_ptr<TemplateStore>> s =
        TemplateStore::LoadDirectory(DataDir() / "templates");
    if (!s.ok()) Die(s.status());
    return s->release();
  }();
  return *store;
}

ServiceConfig TestConfig() {
  ServiceConfig c;
  c.seed = 20260101;
  c.operator_token = "test-token";
  c.data_dir = DataDir().string();
  return c;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("dpconsent-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::unique_ptr<PipelineService> MakeService(const ServiceConfig& config,
                                             ServiceOptions options) {
  absl::StatusOr<std::unique_ptr<PipelineService>> s = PipelineService::Create(
      config, &ShippedRegistry(), &ShippedTemplates(), std::move(options));
  if (!s.ok()) Die(s.status());
  return *std::move(s);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace dpconsent::testing
