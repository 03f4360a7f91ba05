// Copyright 2026 The Afford Authors. All Rights Reserved.
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

// Helpers shared by the core sources; not installed.

#ifndef AFFORD_SRC_IO_UTIL_HPP_
#define AFFORD_SRC_IO_UTIL_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "afford/box.hpp"
#include "afford/error.hpp"

namespace afford::detail {

using Json = nlohmann::json;
// Insertion-ordered objects so that emitted files follow the documented field
// order.
using OrderedJson = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames over the target.
void write_file(const std::filesystem::path& path, std::string_view content);

Json parse_json(std::string_view text, std::string_view what);

// Field access that turns missing keys and type errors into kSchemaError.
const Json& require(const Json& object, const char* key, std::string_view what);
std::string require_string(const Json& object, const char* key,
                           std::string_view what);
double require_number(const Json& object, const char* key, std::string_view what);
std::string optional_string(const Json& object, const char* key,
                            std::string_view what);

BoundingBox box_from_json(const Json& value, std::string_view what);
OrderedJson box_to_json(const BoundingBox& box);

std::vector<std::string> split_lines(std::string_view text);

std::string to_lower(std::string_view text);
bool iequals(std::string_view a, std::string_view b);

}  // namespace afford::detail

#endif  // AFFORD_SRC_IO_UTIL_HPP_
