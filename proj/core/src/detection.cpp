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

#include "afford/detection.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include "afford/error.hpp"
#include "io_util.hpp"

namespace afford {

using detail::Json;
using detail::OrderedJson;

namespace {

constexpr std::string_view kSeparator = ". ";

}  // namespace

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorCode::kEmptyLabelSet, "label set is empty");
  std::set<std::string> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw Error(ErrorCode::kMalformedPrompt, "empty label");
    if (label.find(kSeparator) != std::string::npos) {
      throw Error(ErrorCode::kMalformedPrompt,
                  "label '" + label + "' contains the prompt separator");
    }
    if (!seen.insert(detail::to_lower(label)).second) {
      throw Error(ErrorCode::kDuplicateLabel, "label '" + label + "' repeats");
    }
  }
}

LabelSet LabelSet::deduplicated(const std::vector<std::string>& labels) {
  std::vector<std::string> kept;
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (seen.insert(detail::to_lower(label)).second) kept.push_back(label);
  }
  return LabelSet(std::move(kept));
}

bool LabelSet::contains(std::string_view label) const {
  for (const auto& l : labels_) {
    if (l == label) return true;
  }
  return false;
}

std::string build_prompt(const LabelSet& label_set) {
  std::string prompt;
  for (std::size_t i = 0; i < label_set.size(); ++i) {
    if (i > 0) prompt += kSeparator;
    prompt += label_set.labels()[i];
  }
  return prompt;
}

LabelSet parse_prompt(std::string_view prompt) {
  if (prompt.empty()) throw Error(ErrorCode::kMalformedPrompt, "empty prompt");
  std::vector<std::string> labels;
  std::size_t start = 0;
  while (true) {
    auto pos = prompt.find(kSeparator, start);
    auto piece = prompt.substr(start, pos == std::string_view::npos
                                          ? std::string_view::npos
                                          : pos - start);
    if (piece.empty()) {
      throw Error(ErrorCode::kMalformedPrompt,
                  "empty label in prompt '" + std::string(prompt) + "'");
    }
    labels.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + kSeparator.size();
  }
  try {
    return LabelSet(std::move(labels));
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedPrompt, e.detail());
  }
}

const DetectedObject* DetectionSet::find(std::string_view object_id) const {
  for (const auto& o : objects) {
    if (o.object_id == object_id) return &o;
  }
  return nullptr;
}

// --- detections file ------------------------------------------------------

namespace {

std::string where(std::size_t line_no) {
  return "detections line " + std::to_string(line_no);
}

DetectedObject record_from_json(const Json& j, std::size_t dimension,
                                const LabelSet& label_set, std::size_t line_no) {
  const std::string ctx = where(line_no);
  DetectedObject o;
  o.object_id = detail::require_string(j, "object_id", ctx);
  if (o.object_id.empty()) throw Error(ErrorCode::kSchemaError, ctx + ": empty object_id");
  o.frame_id = detail::require_string(j, "frame_id", ctx);
  o.box = detail::box_from_json(detail::require(j, "box", ctx), ctx);
  o.label = detail::require_string(j, "label", ctx);
  // Relabeled records may carry labels outside the prompt vocabulary.
  if (!j.contains("original_label") && !label_set.contains(o.label)) {
    throw Error(ErrorCode::kSchemaError,
                ctx + ": label '" + o.label + "' not in the header label_set");
  }
  o.confidence = detail::require_number(j, "confidence", ctx);
  if (!std::isfinite(o.confidence) || o.confidence < 0.0 || o.confidence > 1.0) {
    throw Error(ErrorCode::kSchemaError,
                ctx + ": confidence " + std::to_string(o.confidence) + " outside [0, 1]");
  }
  const Json& emb = detail::require(j, "embedding", ctx);
  if (!emb.is_array()) throw Error(ErrorCode::kSchemaError, ctx + ": embedding must be an array");
  if (emb.size() != dimension) {
    throw Error(ErrorCode::kDimensionMismatch,
                ctx + ": object " + o.object_id + " has " + std::to_string(emb.size()) +
                    " embedding values, header declares " + std::to_string(dimension));
  }
  o.embedding.reserve(dimension);
  double norm2 = 0.0;
  for (const auto& v : emb) {
    if (!v.is_number()) throw Error(ErrorCode::kSchemaError, ctx + ": non-numeric embedding value");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::kSchemaError, ctx + ": non-finite embedding value");
    o.embedding.push_back(x);
    norm2 += x * x;
  }
  if (norm2 == 0.0) {
    throw Error(ErrorCode::kZeroNormEmbedding,
                ctx + ": object " + o.object_id + " has a zero-norm embedding");
  }
  return o;
}

}  // namespace

DetectionSet parse_detections(std::string_view text) {
  auto lines = detail::split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && lines[i].empty()) ++i;
  if (i == lines.size()) throw Error(ErrorCode::kSchemaError, "detections file has no header");

  const Json header = detail::parse_json(lines[i], "detections header");
  const std::string hdr = "detections header";
  const Json& version = detail::require(header, "format_version", hdr);
  if (!version.is_number_integer() || version.get<int>() != kDetectionsFormatVersion) {
    throw Error(ErrorCode::kSchemaError, "unsupported detections format_version " + version.dump());
  }
  const Json& dim = detail::require(header, "dimension", hdr);
  if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) {
    throw Error(ErrorCode::kSchemaError, "dimension must be a positive integer");
  }
  const Json& labels = detail::require(header, "label_set", hdr);
  if (!labels.is_array()) throw Error(ErrorCode::kSchemaError, "label_set must be an array");
  std::vector<std::string> label_list;
  for (const auto& l : labels) {
    if (!l.is_string()) throw Error(ErrorCode::kSchemaError, "label_set entries must be strings");
    label_list.push_back(l.get<std::string>());
  }
  DetectionSet set;
  set.dimension = dim.get<std::size_t>();
  try {
    set.label_set = LabelSet(std::move(label_list));
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaError, "header label_set: " + std::string(e.what()));
  }

  std::unordered_set<std::string> ids;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const Json j = detail::parse_json(lines[i], where(i + 1));
    auto object = record_from_json(j, set.dimension, set.label_set, i + 1);
    if (!ids.insert(object.object_id).second) {
      throw Error(ErrorCode::kSchemaError,
                  where(i + 1) + ": duplicate object_id " + object.object_id);
    }
    set.objects.push_back(std::move(object));
  }
  return set;
}

DetectionSet ingest_detections(const std::filesystem::path& path) {
  return parse_detections(detail::read_file(path));
}

std::string format_detections(const DetectionSet& detections) {
  std::string out;
  OrderedJson header{{"format_version", kDetectionsFormatVersion},
                     {"dimension", detections.dimension},
                     {"label_set", detections.label_set.labels()}};
  out += header.dump() + "\n";
  for (const auto& o : detections.objects) {
    OrderedJson j{{"object_id", o.object_id},
                  {"frame_id", o.frame_id},
                  {"box", detail::box_to_json(o.box)},
                  {"label", o.label},
                  {"confidence", o.confidence},
                  {"embedding", o.embedding}};
    out += j.dump() + "\n";
  }
  return out;
}

void write_detections(const DetectionSet& detections,
                      const std::filesystem::path& path) {
  detail::write_file(path, format_detections(detections));
}

DetectionSet FilePlaybackDetector::detect(const LabelSet& label_set) {
  DetectionSet set = ingest_detections(path_);
  for (const auto& wanted : label_set.labels()) {
    bool found = false;
    for (const auto& have : set.label_set.labels()) {
      if (detail::iequals(wanted, have)) found = true;
    }
    if (!found) {
      throw Error(ErrorCode::kSchemaError, path_.string() + " was not recorded with label '" +
                                               wanted + "' in its prompt");
    }
  }
  return set;
}

std::unique_ptr<Detector> make_file_detector(std::filesystem::path path) {
  return std::make_unique<FilePlaybackDetector>(std::move(path));
}

}  // namespace afford
