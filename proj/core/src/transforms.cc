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

#include "redforge/transforms.h"

#include <set>

#include "redforge/error.h"

namespace redforge {
namespace {

constexpr std::string_view kPromptVariable = "prompt";

std::string Uppercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string Leetspeak(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    switch (c) {
      case 'a': case 'A': c = '4'; break;
      case 'e': case 'E': c = '3'; break;
      case 'i': case 'I': c = '1'; break;
      case 'o': case 'O': c = '0'; break;
      case 's': case 'S': c = '5'; break;
      default: break;
    }
  }
  return out;
}

std::string Rot13(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') {
      c = static_cast<char>('a' + (c - 'a' + 13) % 26);
    } else if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>('A' + (c - 'A' + 13) % 26);
    }
  }
  return out;
}

bool IsNameChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
}

// Calls `on_literal(text)` and `on_var(name)` in template order.
template <typename Literal, typename Var>
void ScanTemplate(std::string_view tmpl, Literal on_literal, Var on_var) {
  size_t pos = 0;
  while (pos < tmpl.size()) {
    size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      on_literal(tmpl.substr(pos));
      return;
    }
    on_literal(tmpl.substr(pos, open - pos));
    size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw TemplateSyntaxError(
          open, "unterminated placeholder at byte " + std::to_string(open));
    }
    std::string_view raw = tmpl.substr(open + 2, close - open - 2);
    size_t b = raw.find_first_not_of(' ');
    size_t e = raw.find_last_not_of(' ');
    std::string_view name =
        b == std::string_view::npos ? std::string_view{} : raw.substr(b, e - b + 1);
    bool ok = !name.empty();
    for (char c : name) ok = ok && IsNameChar(c);
    if (!ok) {
      throw TemplateSyntaxError(
          open, "malformed placeholder at byte " + std::to_string(open));
    }
    on_var(name);
    pos = close + 2;
  }
}

StringMap TemplateBindings(const ConverterSpec& spec, std::string_view text) {
  StringMap bindings;
  for (const auto& [k, v] : spec.params) {
    if (k != "template") bindings[k] = v;
  }
  bindings[std::string(kPromptVariable)] = std::string(text);
  return bindings;
}

std::string ParamOrEmpty(const StringMap& params, const std::string& key) {
  auto it = params.find(key);
  return it == params.end() ? std::string() : it->second;
}

}  // namespace

std::string Base64Encode(std::string_view bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    uint32_t n = (static_cast<uint8_t>(bytes[i]) << 16) |
                 (static_cast<uint8_t>(bytes[i + 1]) << 8) |
                 static_cast<uint8_t>(bytes[i + 2]);
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(kAlphabet[(n >> 6) & 63]);
    out.push_back(kAlphabet[n & 63]);
  }
  size_t rest = bytes.size() - i;
  if (rest == 1) {
    uint32_t n = static_cast<uint8_t>(bytes[i]) << 16;
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.append("==");
  } else if (rest == 2) {
    uint32_t n = (static_cast<uint8_t>(bytes[i]) << 16) |
                 (static_cast<uint8_t>(bytes[i + 1]) << 8);
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(kAlphabet[(n >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string RenderTemplate(std::string_view tmpl, const StringMap& bindings) {
  std::string out;
  out.reserve(tmpl.size());
  ScanTemplate(
      tmpl, [&](std::string_view lit) { out.append(lit); },
      [&](std::string_view name) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end()) throw UnboundVariableError(std::string(name));
        out.append(it->second);
      });
  return out;
}

std::vector<std::string> TemplateVariables(std::string_view tmpl) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  ScanTemplate(
      tmpl, [](std::string_view) {},
      [&](std::string_view name) {
        if (seen.insert(std::string(name)).second) names.emplace_back(name);
      });
  return names;
}

std::string ApplyConverter(const ConverterSpec& spec, std::string_view text) {
  switch (spec.kind) {
    case ConverterKind::kIdentity:
      return std::string(text);
    case ConverterKind::kUppercase:
      return Uppercase(text);
    case ConverterKind::kLeetspeak:
      return Leetspeak(text);
    case ConverterKind::kRot13:
      return Rot13(text);
    case ConverterKind::kBase64:
      return Base64Encode(text);
    case ConverterKind::kPrefixInject:
      return ParamOrEmpty(spec.params, "text") + "\n" + std::string(text);
    case ConverterKind::kSuffixInject:
      return std::string(text) + "\n" + ParamOrEmpty(spec.params, "text");
    case ConverterKind::kTemplate:
      return RenderTemplate(ParamOrEmpty(spec.params, "template"),
                            TemplateBindings(spec, text));
  }
  return std::string(text);
}

std::string ApplyChain(const ConverterChain& chain, std::string_view text) {
  std::string current(text);
  for (size_t i = 0; i < chain.steps.size(); ++i) {
    try {
      current = ApplyConverter(chain.steps[i], current);
    } catch (const Error& e) {
      throw ChainStepError(i, e.code(), e.what());
    }
  }
  return current;
}

std::vector<std::string> ConverterSpecViolations(const ConverterSpec& spec) {
  std::vector<std::string> out;
  const std::string kind(ToString(spec.kind));
  switch (spec.kind) {
    case ConverterKind::kPrefixInject:
    case ConverterKind::kSuffixInject:
      if (ParamOrEmpty(spec.params, "text").empty()) {
        out.push_back(kind + " requires non-empty 'text'");
      }
      break;
    case ConverterKind::kTemplate: {
      auto it = spec.params.find("template");
      if (it == spec.params.end()) {
        out.push_back("template requires a 'template' param");
        break;
      }
      try {
        for (const auto& name : TemplateVariables(it->second)) {
          if (name != kPromptVariable && !spec.params.contains(name)) {
            out.push_back("template references unbound variable '" + name + "'");
          }
        }
      } catch (const Error& e) {
        out.push_back(e.what());
      }
      break;
    }
    default:
      break;
  }
  return out;
}

}  // namespace redforge
