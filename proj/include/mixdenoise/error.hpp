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

#ifndef MIXDENOISE_ERROR_HPP_
#define MIXDENOISE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mixdenoise {

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments (bad probability, vocab too small, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be used (missing files, bad UTF-8, malformed corpora).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixdenoise

#endif  // MIXDENOISE_ERROR_HPP_
