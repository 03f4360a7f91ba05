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

#ifndef AFFORD_DETECTION_HPP_
#define AFFORD_DETECTION_HPP_

// Detections as produced by an open-vocabulary detector, the label-set prompt
// that drives it, and the line-delimited JSON file format they travel in.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afford/box.hpp"

namespace afford {

// Non-empty ordered vocabulary; no two labels equal ignoring case.
class LabelSet {
 public:
  // Throws kEmptyLabelSet, kMalformedPrompt (empty label or one containing
  // the ". " separator) or kDuplicateLabel.
  explicit LabelSet(std::vector<std::string> labels);

  // Keeps the first spelling of each case-insensitive duplicate.
  static LabelSet deduplicated(const std::vector<std::string>& labels);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(std::string_view label) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> labels_;
};

// "<l0>. <l1>. ... <ln>"
std::string build_prompt(const LabelSet& label_set);
// Inverse of build_prompt. Throws kMalformedPrompt.
LabelSet parse_prompt(std::string_view prompt);

struct DetectedObject {
  std::string object_id;
  std::string frame_id;
  BoundingBox box;
  std::string label;
  double confidence = 0.0;
  std::vector<double> embedding;

  friend bool operator==(const DetectedObject&, const DetectedObject&) = default;
};

struct DetectionSet {
  std::size_t dimension = 0;
  std::vector<DetectedObject> objects;
  LabelSet label_set{{"object"}};

  const DetectedObject* find(std::string_view object_id) const;

  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
};

// A human label for one detected object.
struct LabelAssignment {
  std::string object_id;
  std::string label;

  friend bool operator==(const LabelAssignment&,
                         const LabelAssignment&) = default;
};

inline constexpr int kDetectionsFormatVersion = 1;

// Reads a detections file: a header line {format_version, dimension,
// label_set} followed by one record per line. Throws kIoError, kSchemaError,
// kDimensionMismatch or kZeroNormEmbedding.
DetectionSet ingest_detections(const std::filesystem::path& path);
DetectionSet parse_detections(std::string_view text);

std::string format_detections(const DetectionSet& detections);
void write_detections(const DetectionSet& detections,
                      const std::filesystem::path& path);

// Source of detections. The only shipped implementation replays a file; a
// live detector would plug in here.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual DetectionSet detect(const LabelSet& label_set) = 0;
};

class FilePlaybackDetector : public Detector {
 public:
  explicit FilePlaybackDetector(std::filesystem::path path)
      : path_(std::move(path)) {}

  // Replays the file; its header label set must cover `label_set`.
  DetectionSet detect(const LabelSet& label_set) override;

 private:
  std::filesystem::path path_;
};

std::unique_ptr<Detector> make_file_detector(std::filesystem::path path);

}  // namespace afford

#endif  // AFFORD_DETECTION_HPP_
