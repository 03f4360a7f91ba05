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

#include "io_util.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <system_error>

namespace afford::detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "failed reading " + path.string());
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::kIoError, "cannot create " +
                                           path.parent_path().string() + ": " +
                                           ec.message());
    }
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIoError, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot move into place " + path.string() + ": " + ec.message());
  }
}

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": invalid JSON: " + e.what());
  }
}

const Json& require(const Json& object, const char* key, std::string_view what) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kSchemaError, std::string(what) + " must be an object");
  }
  auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": missing field '" + key + "'");
  }
  return *it;
}

std::string require_string(const Json& object, const char* key,
                           std::string_view what) {
  const Json& value = require(object, key, what);
  if (!value.is_string()) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": field '" + key + "' must be a string");
  }
  return value.get<std::string>();
}

double require_number(const Json& object, const char* key, std::string_view what) {
  const Json& value = require(object, key, what);
  if (!value.is_number()) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": field '" + key + "' must be a number");
  }
  return value.get<double>();
}

std::string optional_string(const Json& object, const char* key,
                            std::string_view what) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

BoundingBox box_from_json(const Json& value, std::string_view what) {
  if (!value.is_array() || value.size() != 4 ||
      !std::all_of(value.begin(), value.end(),
                   [](const Json& v) { return v.is_number(); })) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": box must be [x_min, y_min, x_max, y_max]");
  }
  BoundingBox box{value[0].get<double>(), value[1].get<double>(),
                  value[2].get<double>(), value[3].get<double>()};
  if (!box.valid()) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": box needs finite coordinates with min < max");
  }
  return box;
}

OrderedJson box_to_json(const BoundingBox& box) {
  return OrderedJson::array({box.x_min, box.y_min, box.x_max, box.y_max});
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace afford::detail
