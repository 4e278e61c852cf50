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

#include "redforge/ids.h"

#include <array>
#include <cstdint>
#include <random>
#include <thread>

namespace redforge {
namespace {

std::mt19937_64& ThreadEngine() {
  thread_local std::mt19937_64 engine = [] {
    std::random_device device;
    std::seed_seq seq{device(), device(), device(), device(),
                      static_cast<unsigned>(
                          std::hash<std::thread::id>{}(std::this_thread::get_id()))};
    return std::mt19937_64(seq);
  }();
  return engine;
}

}  // namespace

std::string NewId() {
  static constexpr char kHex[] = "0123456789abcdef";
  auto& engine = ThreadEngine();
  std::array<uint64_t, 2> words = {engine(), engine()};
  std::string out;
  out.reserve(32);
  for (uint64_t w : words) {
    for (int shift = 60; shift >= 0; shift -= 4) {
      out.push_back(kHex[(w >> shift) & 0xF]);
    }
  }
  return out;
}

bool IsWellFormedId(const std::string& id) {
  if (id.size() != 32) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace redforge
