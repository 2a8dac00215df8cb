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

#ifndef REVO_COMMON_RESOURCES_H_
#define REVO_COMMON_RESOURCES_H_

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace revo {

// Text resources compiled into the binary, keyed by repository-relative path
// (e.g. "prompts/v1/system.txt").
const std::map<std::string, std::string_view, std::less<>>& EmbeddedResources();

// Returns the embedded resource at `path`; throws revo::ConfigError if absent.
std::string_view EmbeddedResource(std::string_view path);

// Reads a whole file; throws revo::Error on failure.
std::string ReadFile(const std::filesystem::path& path);

// Writes `contents` to a sibling temp file then renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace revo

#endif  // REVO_COMMON_RESOURCES_H_
