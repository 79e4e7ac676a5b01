// Copyright 2026 The MEntA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MENTA_IO_H_
#define MENTA_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace menta::io {

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

void AppendLine(const std::filesystem::path& path, std::string_view line);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);

std::string Sha256Hex(std::string_view data);

}  // namespace menta::io

#endif  // MENTA_IO_H_
