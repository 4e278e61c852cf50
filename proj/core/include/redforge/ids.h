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

#ifndef REDFORGE_IDS_H_
#define REDFORGE_IDS_H_

#include <string>

namespace redforge {

// 128 random bits rendered as 32 lowercase hex characters.
std::string NewId();

bool IsWellFormedId(const std::string& id);

}  // namespace redforge

#endif  // REDFORGE_IDS_H_
