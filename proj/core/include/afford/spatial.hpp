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

#ifndef AFFORD_SPATIAL_HPP_
#define AFFORD_SPATIAL_HPP_

// Fuzzy spatial verification of door openers: an opener should sit near a
// vertical side of some door in its frame, and near that door's vertical
// middle. Openers that fail are suppressed as false positives.

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afford/box.hpp"

namespace afford {
struct DetectedObject;
namespace relabel {
struct RelabeledObject;
}
}  // namespace afford

namespace afford::spatial {

inline constexpr double kDefaultKeepThreshold = 0.25;

struct SpatialRule {
  std::string door_label = "door";
  std::set<std::string> opener_labels;
  double keep_threshold = kDefaultKeepThreshold;

  friend bool operator==(const SpatialRule&, const SpatialRule&) = default;
};

// Throws kInvalidRule.
void validate_rule(const SpatialRule& rule);

SpatialRule default_door_rule();

// What verification needs to know about an object.
struct SpatialObject {
  std::string object_id;
  std::string frame_id;
  std::string label;
  double confidence = 0.0;
  BoundingBox box;
};

SpatialObject to_spatial(const DetectedObject& object);
SpatialObject to_spatial(const relabel::RelabeledObject& object);

struct SpatialVerdict {
  std::string opener_id;
  std::optional<std::string> best_door_id;
  double hor_score = 0.0;
  double vert_score = 0.0;
  double combined_score = 0.0;
  bool kept = false;

  friend bool operator==(const SpatialVerdict&, const SpatialVerdict&) = default;
};

// max(1 - distance of the opener center to the nearer vertical door side
// / door width, 0).
double hor_range_score(const BoundingBox& opener, const BoundingBox& door);

// max(1 - |opener center y - door center y| / door height, 0).
double vert_range_score(const BoundingBox& opener, const BoundingBox& door);

// One verdict per opener, in input order. The score against a door is
// c(door) * c(opener) * hor * vert; the best door in the same frame wins
// (first in input order on ties).
std::vector<SpatialVerdict> verify(std::span<const SpatialObject> objects,
                                   const SpatialRule& rule);

// Input objects minus the openers whose verdict was not kept.
std::vector<SpatialObject> filter_kept(std::span<const SpatialObject> objects,
                                       std::span<const SpatialVerdict> verdicts);

// {door_label, opener_labels:[...], keep_threshold}
SpatialRule parse_rule(std::string_view json_text);
SpatialRule load_rule(const std::filesystem::path& path);
std::string format_rule(const SpatialRule& rule);

std::string verdicts_to_json(std::span<const SpatialVerdict> verdicts);
std::vector<SpatialVerdict> verdicts_from_json(std::string_view json_text);

}  // namespace afford::spatial

#endif  // AFFORD_SPATIAL_HPP_
