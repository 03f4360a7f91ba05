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

#include "afford/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "afford/detection.hpp"
#include "afford/error.hpp"
#include "afford/relabeler.hpp"
#include "io_util.hpp"

namespace afford::spatial {

using detail::Json;
using detail::OrderedJson;

void validate_rule(const SpatialRule& rule) {
  if (rule.door_label.empty()) throw Error(ErrorCode::kInvalidRule, "door_label is empty");
  if (rule.opener_labels.empty()) throw Error(ErrorCode::kInvalidRule, "opener_labels is empty");
  if (rule.opener_labels.contains(rule.door_label)) {
    throw Error(ErrorCode::kInvalidRule, "door_label '" + rule.door_label + "' is also an opener");
  }
  if (!(rule.keep_threshold >= 0.0 && rule.keep_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidRule, "keep_threshold must lie in [0, 1]");
  }
}

SpatialRule default_door_rule() {
  return SpatialRule{"door", {"button", "handle", "knob", "push bar"}, kDefaultKeepThreshold};
}

SpatialObject to_spatial(const DetectedObject& o) {
  return {o.object_id, o.frame_id, o.label, o.confidence, o.box};
}

SpatialObject to_spatial(const relabel::RelabeledObject& o) {
  return {o.object_id, o.frame_id, o.new_label, o.new_confidence, o.box};
}

double hor_range_score(const BoundingBox& opener, const BoundingBox& door) {
  const double cx = opener.center_x();
  const double dist = std::min(std::abs(cx - door.x_min), std::abs(cx - door.x_max));
  return std::max(1.0 - dist / door.width(), 0.0);
}

double vert_range_score(const BoundingBox& opener, const BoundingBox& door) {
  const double dist = std::abs(opener.center_y() - door.center_y());
  return std::max(1.0 - dist / door.height(), 0.0);
}

std::vector<SpatialVerdict> verify(std::span<const SpatialObject> objects,
                                   const SpatialRule& rule) {
  validate_rule(rule);
  std::unordered_map<std::string_view, std::vector<const SpatialObject*>> doors_by_frame;
  for (const auto& o : objects) {
    if (o.label == rule.door_label) doors_by_frame[o.frame_id].push_back(&o);
  }

  std::vector<SpatialVerdict> verdicts;
  for (const auto& opener : objects) {
    if (!rule.opener_labels.contains(opener.label)) continue;
    SpatialVerdict v;
    v.opener_id = opener.object_id;
    if (auto it = doors_by_frame.find(opener.frame_id); it != doors_by_frame.end()) {
      double best = -1.0;
      for (const SpatialObject* door : it->second) {
        const double hor = hor_range_score(opener.box, door->box);
        const double vert = vert_range_score(opener.box, door->box);
        const double combined = door->confidence * opener.confidence * hor * vert;
        if (combined > best) {
          best = combined;
          v.best_door_id = door->object_id;
          v.hor_score = hor;
          v.vert_score = vert;
          v.combined_score = combined;
        }
      }
    }
    v.kept = v.best_door_id.has_value() && v.combined_score >= rule.keep_threshold;
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

std::vector<SpatialObject> filter_kept(std::span<const SpatialObject> objects,
                                       std::span<const SpatialVerdict> verdicts) {
  std::unordered_map<std::string_view, bool> kept;
  for (const auto& v : verdicts) kept.emplace(v.opener_id, v.kept);
  std::vector<SpatialObject> out;
  for (const auto& o : objects) {
    auto it = kept.find(o.object_id);
    if (it == kept.end() || it->second) out.push_back(o);
  }
  return out;
}

SpatialRule parse_rule(std::string_view json_text) {
  const Json root = detail::parse_json(json_text, "spatial rule");
  SpatialRule rule;
  rule.door_label = detail::require_string(root, "door_label", "spatial rule");
  const Json& openers = detail::require(root, "opener_labels", "spatial rule");
  if (!openers.is_array()) throw Error(ErrorCode::kSchemaError, "opener_labels must be an array");
  for (const auto& l : openers) {
    if (!l.is_string()) throw Error(ErrorCode::kSchemaError, "opener_labels must be strings");
    rule.opener_labels.insert(l.get<std::string>());
  }
  if (root.contains("keep_threshold")) {
    rule.keep_threshold = detail::require_number(root, "keep_threshold", "spatial rule");
  }
  validate_rule(rule);
  return rule;
}

SpatialRule load_rule(const std::filesystem::path& path) {
  return parse_rule(detail::read_file(path));
}

std::string format_rule(const SpatialRule& rule) {
  OrderedJson root{{"door_label", rule.door_label},
                   {"opener_labels", rule.opener_labels},
                   {"keep_threshold", rule.keep_threshold}};
  return root.dump(2) + "\n";
}

std::string verdicts_to_json(std::span<const SpatialVerdict> verdicts) {
  OrderedJson list = OrderedJson::array();
  for (const auto& v : verdicts) {
    OrderedJson j{{"opener_id", v.opener_id}};
    j["best_door_id"] = v.best_door_id ? OrderedJson(*v.best_door_id) : OrderedJson(nullptr);
    j["hor_score"] = v.hor_score;
    j["vert_score"] = v.vert_score;
    j["combined_score"] = v.combined_score;
    j["kept"] = v.kept;
    list.push_back(std::move(j));
  }
  return list.dump(2) + "\n";
}

std::vector<SpatialVerdict> verdicts_from_json(std::string_view json_text) {
  const Json root = detail::parse_json(json_text, "verdicts");
  if (!root.is_array()) throw Error(ErrorCode::kSchemaError, "verdicts must be an array");
  std::vector<SpatialVerdict> out;
  for (const auto& j : root) {
    SpatialVerdict v;
    v.opener_id = detail::require_string(j, "opener_id", "verdict");
    std::string door = detail::optional_string(j, "best_door_id", "verdict");
    if (!door.empty()) v.best_door_id = door;
    v.hor_score = detail::require_number(j, "hor_score", "verdict");
    v.vert_score = detail::require_number(j, "vert_score", "verdict");
    v.combined_score = detail::require_number(j, "combined_score", "verdict");
    const Json& kept = detail::require(j, "kept", "verdict");
    if (!kept.is_boolean()) throw Error(ErrorCode::kSchemaError, "kept must be a boolean");
    v.kept = kept.get<bool>();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace afford::spatial
