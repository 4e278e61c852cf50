// Copyright 2026 The RedForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "redforge/campaign_file.h"

#include <fstream>
#include <sstream>

#include "redforge/error.h"

namespace redforge {
namespace {

std::string Resolve(const std::string& path, const std::filesystem::path& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (base_dir / p).lexically_normal().string();
}

}  // namespace

CampaignConfig ParseCampaignText(std::string_view text, const std::filesystem::path& base_dir) {
  CampaignConfig config;
  try {
    Json j = Json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/true,
                         /*ignore_comments=*/true);
    config = j.get<CampaignConfig>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kParse, std::string("campaign document: ") + e.what());
  }
  config.dataset.path = Resolve(config.dataset.path, base_dir);
  if (auto* b = std::get_if<BenchmarkParams>(&config.orchestrator)) {
    b->library_ref = Resolve(b->library_ref, base_dir);
  }
  return config;
}

CampaignConfig LoadCampaignFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "campaign file " + path.string() + " unreadable");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseCampaignText(buf.str(), path.parent_path());
}

}  // namespace redforge
