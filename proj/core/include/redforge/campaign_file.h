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


// Campaign documents on disk: JSON with // and /* */ comments. Relative
// dataset and library paths resolve against the document's directory.

#ifndef REDFORGE_CAMPAIGN_FILE_H_
#define REDFORGE_CAMPAIGN_FILE_H_

#include <filesystem>
#include <string_view>

#include "redforge/model.h"

namespace redforge {

// Throws Error(kParse) on malformed documents.
CampaignConfig ParseCampaignText(std::string_view text,
                                 const std::filesystem::path& base_dir = {});

// Throws Error(kNotFound) when the file cannot be read.
CampaignConfig LoadCampaignFile(const std::filesystem::path& path);

}  // namespace redforge

#endif  // REDFORGE_CAMPAIGN_FILE_H_
