// Copyright 2026 The mixdenoise Authors.
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

#ifndef MIXDENOISE_HASH_HPP_
#define MIXDENOISE_HASH_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace mixdenoise {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// SHA-256 over the sorted (relative name, content) pairs of the regular files
// directly inside `dir`.
std::string directory_hash(const std::filesystem::path& dir);

}  // namespace mixdenoise

#endif  // MIXDENOISE_HASH_HPP_
