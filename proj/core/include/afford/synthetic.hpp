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

#ifndef AFFORD_SYNTHETIC_HPP_
#define AFFORD_SYNTHETIC_HPP_

// Deterministic stand-in for a vision-language detector: class-clustered
// embeddings, door scenes with openers at the door edges, label confusion and
// off-door false positives.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "afford/detection.hpp"
#include "afford/eval.hpp"

namespace afford::synth {

struct SyntheticClass {
  std::string label;
  std::vector<double> center;  // unit vector
  std::size_t count = 0;
};

struct SyntheticSpec {
  std::vector<SyntheticClass> classes;
  // Vocabulary labels with no real instances; detector confusion can still
  // emit them.
  std::vector<std::string> extra_labels;
  double noise_sigma = 0.1;
  double corruption_rate = 0.0;
  // Objects of this class anchor one frame each; every other class is an
  // opener placed at a door edge near mid-height.
  std::string door_label = "door";
  // Opener-like clutter placed away from the door; never in the ground truth.
  std::size_t off_door_false_positives = 0;
  // Cosine between a false positive's clean embedding and its opener class
  // center.
  double false_positive_alignment = 0.6;
  double door_width = 200.0;
  double door_height = 400.0;
  double opener_size = 24.0;
  double min_confidence = 0.3;
  double max_confidence = 0.95;
};

struct SyntheticDataset {
  DetectionSet detections;
  std::vector<eval::GroundTruthObject> ground_truth;
  // Per object, parallel to detections.objects.
  std::vector<std::string> true_class;
  std::vector<bool> off_door_false_positive;
};

// Gaussian directions normalized to unit length.
std::vector<std::vector<double>> random_unit_centers(std::size_t count,
                                                     std::size_t dimension,
                                                     std::uint64_t seed);

// Throws kInvalidSpec.
void validate_spec(const SyntheticSpec& spec);

SyntheticDataset generate_synthetic(const SyntheticSpec& spec,
                                    std::uint64_t seed);

// Five-label door-opening vocabulary ("door", "handle", "knob", "push bar",
// "button"); knob exists only as a confusion target.
SyntheticSpec door_opening_spec(std::size_t dimension, std::uint64_t seed);

// Simulated sparse human feedback: for each (class, k) pick the k true
// instances of that class closest to the class mean embedding.
std::vector<LabelAssignment> pick_exemplars(
    const SyntheticDataset& dataset,
    const std::vector<std::pair<std::string, std::size_t>>& per_class);

}  // namespace afford::synth

#endif  // AFFORD_SYNTHETIC_HPP_
