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


// API bearer tokens. A bearer credential is "<token_id>.<secret>"; only a
// salted SHA-256 of the secret is ever stored.

#ifndef REDFORGE_TOKEN_STORE_H_
#define REDFORGE_TOKEN_STORE_H_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redforge/model.h"

namespace redforge {

enum class Role { kViewer, kOperator, kAdmin };

std::string_view ToString(Role role);
Role ParseRole(std::string_view text);

struct RateLimit {
  int capacity = 60;
  int refill_per_minute = 60;

  bool operator==(const RateLimit&) const = default;
};

struct ApiToken {
  std::string token_id;
  std::string salt;         // hex
  std::string secret_hash;  // hex SHA-256 of salt bytes || secret
  Role role = Role::kViewer;
  RateLimit rate_limit;
  std::string label;

  bool operator==(const ApiToken&) const = default;
};

void to_json(Json& j, const RateLimit& v);
void from_json(const Json& j, RateLimit& v);
void to_json(Json& j, const ApiToken& v);
void from_json(const Json& j, ApiToken& v);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);

// Salted hash as stored in ApiToken::secret_hash.
std::string HashSecret(std::string_view salt_hex, std::string_view secret);

struct IssuedToken {
  ApiToken token;
  // Returned once; never persisted.
  std::string bearer;
};

// Thread-safe token registry, optionally backed by a JSON file.
class TokenStore {
 public:
  // In-memory store.
  TokenStore() = default;
  // Loads `path` when it exists; every change is written back.
  explicit TokenStore(std::filesystem::path path);

  IssuedToken Create(Role role, RateLimit limit = {}, std::string label = {});

  // Resolves a bearer credential; nullopt for unknown ids, wrong secrets and
  // garbled input.
  std::optional<ApiToken> Verify(std::string_view bearer) const;

  std::optional<ApiToken> Find(std::string_view token_id) const;
  std::vector<ApiToken> List() const;
  size_t size() const;

 private:
  void Save() const;

  std::optional<std::filesystem::path> path_;
  mutable std::mutex mu_;
  std::map<std::string, ApiToken, std::less<>> tokens_;
};

// First characters of a bearer credential, safe to log.
std::string BearerPrefix(std::string_view bearer);

}  // namespace redforge

#endif  // REDFORGE_TOKEN_STORE_H_
