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

#ifndef AFFORD_EVAL_HPP_
#define AFFORD_EVAL_HPP_

// IoU-matched average precision and mAP at a single IoU threshold.

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "afford/box.hpp"

namespace afford::eval {

struct GroundTruthObject {
  std::string frame_id;
  BoundingBox box;
  std::string label;

  friend bool operator==(const GroundTruthObject&,
                         const GroundTruthObject&) = default;
};

struct Prediction {
  std::string object_id;
  std::string frame_id;
  BoundingBox box;
  std::string label;
  double confidence = 0.0;
};

double iou(const BoundingBox& a, const BoundingBox& b);

struct MatchResult {
  // Parallel to the predictions passed in.
  std::vector<bool> true_positive;
  // Ground truths left unmatched, per class.
  std::map<std::string, std::size_t> false_negatives;
};

// Greedy per (class, frame) matching: predictions by confidence descending
// (ties by object_id) each take the unmatched same-class ground truth with the
// highest IoU at or above the threshold.
MatchResult match_detections(std::span<const Prediction> predictions,
                             std::span<const GroundTruthObject> ground_truth,
                             double iou_threshold);

// All-point interpolated AP of a confidence-ranked TP/FP sequence.
double average_precision(const std::vector<bool>& ranked_true_positive,
                         std::size_t num_ground_truth);

struct ClassCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t ground_truth = 0;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct EvalReport {
  // Only classes present in the ground truth.
  std::map<std::string, double> per_class_ap;
  double map_score = 0.0;
  double iou_threshold = 0.5;
  // Every class seen in predictions or ground truth.
  std::map<std::string, ClassCounts> counts;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate(std::span<const Prediction> predictions,
                    std::span<const GroundTruthObject> ground_truth,
                    double iou_threshold = 0.5);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view json_text);

// One row per class: label, then one AP column per named report. Classes are
// the union of the reports' ground-truth classes. A final "mAP" row follows.
std::string reports_to_csv(
    const std::vector<std::pair<std::string, const EvalReport*>>& columns);

std::vector<GroundTruthObject> load_ground_truth(
    const std::filesystem::path& path);
void save_ground_truth(std::span<const GroundTruthObject> ground_truth,
                       const std::filesystem::path& path);

}  // namespace afford::eval

#endif  // AFFORD_EVAL_HPP_
