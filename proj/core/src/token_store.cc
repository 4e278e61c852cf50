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


#include "redforge/token_store.h"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <fstream>

#include "redforge/error.h"

namespace redforge {
namespace {

std::string Hex(const unsigned char* data, size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xf]);
  }
  return out;
}

std::string RandomHex(size_t bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
    throw Error(ErrorCode::kInvalidState, "random source unavailable");
  }
  return Hex(buf.data(), buf.size());
}

bool IsLowerHex(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::vector<unsigned char> Unhex(std::string_view hex) {
  std::vector<unsigned char> out;
  out.reserve(hex.size() / 2);
  auto nibble = [](char c) { return c <= '9' ? c - '0' : c - 'a' + 10; };
  for (size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<unsigned char>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
  }
  return out;
}

}  // namespace

std::string_view ToString(Role role) {
  switch (role) {
    case Role::kViewer:
      return "viewer";
    case Role::kOperator:
      return "operator";
    case Role::kAdmin:
      return "admin";
  }
  return "viewer";
}

Role ParseRole(std::string_view text) {
  if (text == "viewer") return Role::kViewer;
  if (text == "operator") return Role::kOperator;
  if (text == "admin") return Role::kAdmin;
  throw Error(ErrorCode::kParse, "unknown role: " + std::string(text));
}

void to_json(Json& j, const RateLimit& v) {
  j = Json{{"capacity", v.capacity}, {"refill_per_minute", v.refill_per_minute}};
}

void from_json(const Json& j, RateLimit& v) {
  v.capacity = j.value("capacity", 60);
  v.refill_per_minute = j.value("refill_per_minute", 60);
}

void to_json(Json& j, const ApiToken& v) {
  j = Json{{"token_id", v.token_id},       {"salt", v.salt},
           {"secret_hash", v.secret_hash}, {"role", ToString(v.role)},
           {"rate_limit", v.rate_limit},   {"label", v.label}};
}

void from_json(const Json& j, ApiToken& v) {
  v.token_id = j.at("token_id").get<std::string>();
  v.salt = j.at("salt").get<std::string>();
  v.secret_hash = j.at("secret_hash").get<std::string>();
  v.role = ParseRole(j.at("role").get<std::string>());
  v.rate_limit = j.value("rate_limit", RateLimit{});
  v.label = j.value("label", std::string());
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidState, "sha256 failed");
  }
  return Hex(digest, len);
}

std::string HashSecret(std::string_view salt_hex, std::string_view secret) {
  std::vector<unsigned char> salt = Unhex(salt_hex);
  std::string material(salt.begin(), salt.end());
  material.append(secret);
  return Sha256Hex(material);
}

std::string BearerPrefix(std::string_view bearer) {
  const size_t dot = bearer.find('.');
  std::string_view visible = bearer.substr(0, std::min<size_t>(dot, 8));
  return std::string(visible) + "...";
}

TokenStore::TokenStore(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::exists(*path_, ec)) return;
  std::ifstream in(*path_);
  if (!in) throw Error(ErrorCode::kStorage, "cannot read token store " + path_->string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, "token store " + path_->string() + ": " + e.what());
  }
  for (const auto& t : doc.at("tokens")) {
    ApiToken token = t.get<ApiToken>();
    tokens_[token.token_id] = std::move(token);
  }
}

IssuedToken TokenStore::Create(Role role, RateLimit limit, std::string label) {
  if (limit.capacity <= 0 || limit.refill_per_minute <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "rate limit values must be positive");
  }
  IssuedToken issued;
  ApiToken& token = issued.token;
  token.token_id = "tok" + RandomHex(8);
  token.salt = RandomHex(16);
  const std::string secret = RandomHex(32);
  token.secret_hash = HashSecret(token.salt, secret);
  token.role = role;
  token.rate_limit = limit;
  token.label = std::move(label);
  issued.bearer = token.token_id + "." + secret;
  {
    std::lock_guard lock(mu_);
    tokens_[token.token_id] = token;
    Save();
  }
  return issued;
}

std::optional<ApiToken> TokenStore::Verify(std::string_view bearer) const {
  const size_t dot = bearer.find('.');
  if (dot == std::string_view::npos || dot == 0) return std::nullopt;
  const std::string_view id = bearer.substr(0, dot);
  const std::string_view secret = bearer.substr(dot + 1);
  if (secret.empty()) return std::nullopt;
  std::lock_guard lock(mu_);
  auto it = tokens_.find(id);
  if (it == tokens_.end()) return std::nullopt;
  const std::string computed = HashSecret(it->second.salt, secret);
  const std::string& stored = it->second.secret_hash;
  if (computed.size() != stored.size() || !IsLowerHex(stored)) return std::nullopt;
  if (CRYPTO_memcmp(computed.data(), stored.data(), stored.size()) != 0) return std::nullopt;
  return it->second;
}

std::optional<ApiToken> TokenStore::Find(std::string_view token_id) const {
  std::lock_guard lock(mu_);
  auto it = tokens_.find(token_id);
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

std::vector<ApiToken> TokenStore::List() const {
  std::lock_guard lock(mu_);
  std::vector<ApiToken> out;
  for (const auto& [id, t] : tokens_) out.push_back(t);
  return out;
}

size_t TokenStore::size() const {
  std::lock_guard lock(mu_);
  return tokens_.size();
}

void TokenStore::Save() const {
  if (!path_) return;
  Json doc{{"tokens", Json::array()}};
  for (const auto& [id, t] : tokens_) doc["tokens"].push_back(t);
  const std::filesystem::path tmp = path_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::kStorage, "cannot write token store " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *path_, ec);
  if (ec) throw Error(ErrorCode::kStorage, "cannot replace token store: " + ec.message());
}

}  // namespace redforge
