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

#include "afford/relabeler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "afford/error.hpp"
#include "io_util.hpp"

namespace afford::relabel {

using detail::Json;
using detail::OrderedJson;

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vectors of dimension " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  double dot = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw Error(ErrorCode::kZeroNormVector, "zero-norm vector");
  // sqrt(aa * bb) makes parallel vectors score exactly 1; the split form only
  // serves when the product leaves the normal range.
  const double product = aa * bb;
  const double denom = std::isnormal(product) ? std::sqrt(product) : std::sqrt(aa) * std::sqrt(bb);
  return std::clamp(dot / denom, -1.0, 1.0);
}

RelabeledObject relabel(const DetectedObject& object, const ExemplarStore& store) {
  if (store.empty()) throw Error(ErrorCode::kEmptyStore, "no exemplars to relabel with");
  if (object.embedding.size() != store.dimension) {
    throw Error(ErrorCode::kDimensionMismatch,
                "object " + object.object_id + " has dimension " +
                    std::to_string(object.embedding.size()) + ", exemplars " +
                    std::to_string(store.dimension));
  }
  std::size_t best = 0;
  double best_similarity = -2.0;
  for (std::size_t i = 0; i < store.exemplars.size(); ++i) {
    double s = 0.0;
    try {
      s = cosine_similarity(object.embedding, store.exemplars[i].embedding);
    } catch (const Error& e) {
      const std::string who = e.code() == ErrorCode::kZeroNormVector
                                  ? "object " + object.object_id + " or exemplar from " +
                                        store.exemplars[i].source_object_id
                                  : "exemplar from " + store.exemplars[i].source_object_id;
      throw Error(e.code(), e.detail() + " (" + who + ")");
    }
    if (s > best_similarity) {
      best_similarity = s;
      best = i;
    }
  }
  RelabeledObject out;
  out.object_id = object.object_id;
  out.frame_id = object.frame_id;
  out.box = object.box;
  out.original_label = object.label;
  out.new_label = store.exemplars[best].label;
  out.raw_similarity = best_similarity;
  out.new_confidence = std::clamp(best_similarity, 0.0, 1.0);
  return out;
}

std::vector<RelabeledObject> relabel_set(const DetectionSet& detections,
                                         const ExemplarStore& store) {
  std::vector<RelabeledObject> out;
  out.reserve(detections.objects.size());
  for (const auto& object : detections.objects) {
    if (std::all_of(object.embedding.begin(), object.embedding.end(),
                    [](double x) { return x == 0.0; })) {
      throw Error(ErrorCode::kZeroNormVector,
                  "object " + object.object_id + " has a zero-norm embedding");
    }
    out.push_back(relabel(object, store));
  }
  return out;
}

std::vector<LabelAssignment> canonical_assignments(
    std::span<const LabelAssignment> assignments) {
  std::map<std::string, std::string> latest;
  for (const auto& a : assignments) latest[a.object_id] = a.label;
  std::vector<LabelAssignment> out;
  out.reserve(latest.size());
  for (auto& [id, label] : latest) out.push_back({id, label});
  return out;
}

ExemplarStore build_store(const DetectionSet& detections,
                          std::span<const LabelAssignment> assignments) {
  std::unordered_map<std::string_view, const DetectedObject*> index;
  for (const auto& o : detections.objects) index.emplace(o.object_id, &o);
  ExemplarStore store;
  store.dimension = detections.dimension;
  for (const auto& a : canonical_assignments(assignments)) {
    auto it = index.find(a.object_id);
    if (it == index.end()) {
      throw Error(ErrorCode::kUnknownObjectId, "no detected object '" + a.object_id + "'");
    }
    store.exemplars.push_back({it->second->embedding, a.label, a.object_id});
  }
  return store;
}

LabelsFile parse_labels(std::string_view json_text) {
  const Json root = detail::parse_json(json_text, "labels");
  LabelsFile labels;
  labels.session_id = detail::optional_string(root, "session_id", "labels");
  const Json& list = detail::require(root, "assignments", "labels");
  if (!list.is_array()) throw Error(ErrorCode::kSchemaError, "assignments must be an array");
  for (const auto& j : list) {
    LabelAssignment a{detail::require_string(j, "object_id", "assignment"),
                      detail::require_string(j, "label", "assignment")};
    if (a.label.empty()) {
      throw Error(ErrorCode::kSchemaError, "empty label for object " + a.object_id);
    }
    labels.assignments.push_back(std::move(a));
  }
  if (auto it = root.find("replace"); it != root.end()) {
    if (!it->is_boolean()) throw Error(ErrorCode::kSchemaError, "replace must be a boolean");
    labels.replace = it->get<bool>();
  }
  return labels;
}

LabelsFile load_labels(const std::filesystem::path& path) {
  return parse_labels(detail::read_file(path));
}

std::string format_labels(const LabelsFile& labels) {
  OrderedJson root;
  root["session_id"] = labels.session_id;
  root["assignments"] = OrderedJson::array();
  for (const auto& a : labels.assignments) {
    root["assignments"].push_back({{"object_id", a.object_id}, {"label", a.label}});
  }
  return root.dump(2) + "\n";
}

std::string format_relabeled(const DetectionSet& detections,
                             std::span<const RelabeledObject> relabeled) {
  std::unordered_map<std::string_view, const DetectedObject*> index;
  for (const auto& o : detections.objects) index.emplace(o.object_id, &o);
  OrderedJson header{{"format_version", kDetectionsFormatVersion},
                     {"dimension", detections.dimension},
                     {"label_set", detections.label_set.labels()}};
  std::string out = header.dump() + "\n";
  for (const auto& r : relabeled) {
    auto it = index.find(r.object_id);
    if (it == index.end()) {
      throw Error(ErrorCode::kUnknownObjectId, "no detected object '" + r.object_id + "'");
    }
    OrderedJson j{{"object_id", r.object_id},
                  {"frame_id", r.frame_id},
                  {"box", detail::box_to_json(r.box)},
                  {"label", r.new_label},
                  {"confidence", r.new_confidence},
                  {"embedding", it->second->embedding},
                  {"original_label", r.original_label},
                  {"raw_similarity", r.raw_similarity}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<RelabeledObject> parse_relabeled(std::string_view text) {
  // The header and record layout are the detections format; reuse its checks.
  const DetectionSet set = parse_detections(text);
  std::vector<RelabeledObject> out;
  out.reserve(set.objects.size());
  std::size_t index = 0;
  for (const auto& line : detail::split_lines(text)) {
    if (line.empty()) continue;
    if (index++ == 0) continue;  // header
    const Json j = detail::parse_json(line, "relabel record");
    const auto& o = set.objects[out.size()];
    RelabeledObject r;
    r.object_id = o.object_id;
    r.frame_id = o.frame_id;
    r.box = o.box;
    r.new_label = o.label;
    r.new_confidence = o.confidence;
    r.original_label = detail::require_string(j, "original_label", "relabel record");
    r.raw_similarity = detail::require_number(j, "raw_similarity", "relabel record");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace afford::relabel
