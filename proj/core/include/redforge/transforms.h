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

// Prompt converters: encodings, obfuscations, injection wrappers and the
// `{{name}}` template renderer. All functions are pure.

#ifndef REDFORGE_TRANSFORMS_H_
#define REDFORGE_TRANSFORMS_H_

#include <string>
#include <string_view>
#include <vector>

#include "redforge/model.h"

namespace redforge {

// Throws UnboundVariableError or TemplateSyntaxError.
std::string ApplyConverter(const ConverterSpec& spec, std::string_view text);

// Left-to-right composition. A failing step surfaces as ChainStepError.
std::string ApplyChain(const ConverterChain& chain, std::string_view text);

// Replaces every `{{name}}` in one pass; substituted values are not rescanned.
std::string RenderTemplate(std::string_view tmpl, const StringMap& bindings);

// Names referenced by a template, in order of first appearance.
std::vector<std::string> TemplateVariables(std::string_view tmpl);

std::string Base64Encode(std::string_view bytes);

// Empty when the spec is usable.
std::vector<std::string> ConverterSpecViolations(const ConverterSpec& spec);

}  // namespace redforge

#endif  // REDFORGE_TRANSFORMS_H_
