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

#ifndef AFFORD_RELABELER_HPP_
#define AFFORD_RELABELER_HPP_

// Nearest-exemplar relabeling by cosine similarity. Only labels and
// confidences change; boxes pass through untouched.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afford/box.hpp"
#include "afford/detection.hpp"

namespace afford::relabel {

// Clamped into [-1, 1] to absorb round-off. Throws kZeroNormVector or
// kDimensionMismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct Exemplar {
  std::vector<double> embedding;
  std::string label;
  std::string source_object_id;

  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

struct ExemplarStore {
  std::size_t dimension = 0;
  std::vector<Exemplar> exemplars;

  bool empty() const noexcept { return exemplars.empty(); }
  std::size_t size() const noexcept { return exemplars.size(); }

  friend bool operator==(const ExemplarStore&, const ExemplarStore&) = default;
};

struct RelabeledObject {
  std::string object_id;
  std::string frame_id;
  BoundingBox box;
  std::string original_label;
  std::string new_label;
  double new_confidence = 0.0;  // raw_similarity clamped to [0, 1]
  double raw_similarity = 0.0;

  friend bool operator==(const RelabeledObject&,
                         const RelabeledObject&) = default;
};

// Label of the most similar exemplar; ties go to the lowest index.
// Throws kEmptyStore, kDimensionMismatch or kZeroNormVector.
RelabeledObject relabel(const DetectedObject& object, const ExemplarStore& store);

// Order-preserving. A zero-norm embedding is reported with its object_id.
std::vector<RelabeledObject> relabel_set(const DetectionSet& detections,
                                         const ExemplarStore& store);

// Later assignments to the same object win; exemplars come out in ascending
// object_id order. Throws kUnknownObjectId.
ExemplarStore build_store(const DetectionSet& detections,
                          std::span<const LabelAssignment> assignments);

// Collapses repeated ids (last write wins) and sorts by object_id.
std::vector<LabelAssignment> canonical_assignments(
    std::span<const LabelAssignment> assignments);

struct LabelsFile {
  std::string session_id;
  std::vector<LabelAssignment> assignments;
  bool replace = false;
};

// {session_id, assignments:[{object_id, label}]}; "replace" is optional.
LabelsFile parse_labels(std::string_view json_text);
LabelsFile load_labels(const std::filesystem::path& path);
std::string format_labels(const LabelsFile& labels);

// Detections schema plus original_label and raw_similarity per record.
// `detections` supplies embeddings and the header.
std::string format_relabeled(const DetectionSet& detections,
                             std::span<const RelabeledObject> relabeled);
std::vector<RelabeledObject> parse_relabeled(std::string_view text);

}  // namespace afford::relabel

#endif  // AFFORD_RELABELER_HPP_
