// Copyright 2026 The Revo Authors.
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

#ifndef REVO_COMMON_ERROR_H_
#define REVO_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace revo {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A persisted checkpoint or store could not be decoded.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace revo

#endif  // REVO_COMMON_ERROR_H_
