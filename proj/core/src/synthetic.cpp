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

#include "afford/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "afford/error.hpp"

namespace afford::synth {

namespace {

constexpr std::size_t kMaxOpenersPerDoor = 8;
constexpr double kUnitTolerance = 1e-6;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
  double n = norm(v);
  for (double& x : v) x /= n;
}

std::string padded(char prefix, std::size_t index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, index);
  return buf;
}

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidSpec, msg);
}

}  // namespace

std::vector<std::vector<double>> random_unit_centers(std::size_t count,
                                                     std::size_t dimension,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> centers;
  while (centers.size() < count) {
    std::vector<double> c(dimension);
    for (double& x : c) x = gauss(rng);
    if (norm(c) == 0.0) continue;
    normalize(c);
    centers.push_back(std::move(c));
  }
  return centers;
}

void validate_spec(const SyntheticSpec& spec) {
  if (spec.classes.empty()) invalid("no classes");
  const std::size_t dim = spec.classes.front().center.size();
  if (dim == 0) invalid("class centers must be non-empty");
  std::set<std::string> labels;
  bool has_door = false;
  std::size_t doors = 0;
  std::size_t openers = 0;
  for (const auto& c : spec.classes) {
    if (c.label.empty()) invalid("empty class label");
    if (!labels.insert(c.label).second) invalid("class '" + c.label + "' repeats");
    if (c.center.size() != dim) invalid("class '" + c.label + "' center has wrong dimension");
    if (std::abs(norm(c.center) - 1.0) > kUnitTolerance) {
      invalid("class '" + c.label + "' center is not a unit vector");
    }
    if (c.label == spec.door_label) {
      has_door = true;
      doors = c.count;
    } else {
      openers += c.count;
    }
  }
  for (const auto& l : spec.extra_labels) {
    if (l.empty()) invalid("empty extra label");
    if (!labels.insert(l).second) invalid("extra label '" + l + "' repeats");
  }
  if (!has_door || doors == 0) invalid("door class '" + spec.door_label + "' needs instances");
  if (openers > doors * kMaxOpenersPerDoor) {
    invalid("more than " + std::to_string(kMaxOpenersPerDoor) + " openers per door");
  }
  if (spec.off_door_false_positives > 0 && spec.classes.size() < 2) {
    invalid("false positives need an opener class");
  }
  if (!std::isfinite(spec.noise_sigma) || spec.noise_sigma < 0.0) invalid("noise_sigma must be >= 0");
  if (!(spec.corruption_rate >= 0.0 && spec.corruption_rate <= 1.0)) {
    invalid("corruption_rate must lie in [0, 1]");
  }
  if (spec.corruption_rate > 0.0 && labels.size() < 2) {
    invalid("label corruption needs at least two labels");
  }
  if (!(spec.false_positive_alignment >= 0.0 && spec.false_positive_alignment <= 1.0)) {
    invalid("false_positive_alignment must lie in [0, 1]");
  }
  if (!(spec.door_width > 0.0 && spec.door_height > 0.0 && spec.opener_size > 0.0)) {
    invalid("box sizes must be positive");
  }
  if (!(spec.min_confidence >= 0.0 && spec.min_confidence <= spec.max_confidence &&
        spec.max_confidence <= 1.0)) {
    invalid("confidence range must satisfy 0 <= min <= max <= 1");
  }
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  const std::size_t dim = spec.classes.front().center.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<std::string> vocabulary;
  for (const auto& c : spec.classes) vocabulary.push_back(c.label);
  for (const auto& l : spec.extra_labels) vocabulary.push_back(l);

  const SyntheticClass* door_class = nullptr;
  std::vector<const SyntheticClass*> opener_classes;
  for (const auto& c : spec.classes) {
    if (c.label == spec.door_label) {
      door_class = &c;
    } else {
      opener_classes.push_back(&c);
    }
  }
  const std::size_t num_frames = door_class->count;

  // Openers are dealt round-robin to frames after a seeded shuffle.
  std::vector<const SyntheticClass*> openers;
  for (const auto* c : opener_classes) openers.insert(openers.end(), c->count, c);
  std::shuffle(openers.begin(), openers.end(), rng);

  struct Slot {
    const SyntheticClass* cls;
    bool false_positive;
  };
  std::vector<std::vector<Slot>> frames(num_frames);
  for (std::size_t i = 0; i < openers.size(); ++i) {
    frames[i % num_frames].push_back({openers[i], false});
  }
  for (std::size_t i = 0; i < spec.off_door_false_positives; ++i) {
    const auto* cls = opener_classes[i % opener_classes.size()];
    frames[i % num_frames].push_back({cls, true});
  }

  auto embed = [&](const SyntheticClass& cls, bool false_positive) {
    std::vector<double> clean = cls.center;
    if (false_positive) {
      // Mix the center with a random direction orthogonal to it.
      std::vector<double> u(dim);
      double dot = 0.0;
      do {
        for (double& x : u) x = gauss(rng);
        dot = std::inner_product(u.begin(), u.end(), cls.center.begin(), 0.0);
        for (std::size_t k = 0; k < dim; ++k) u[k] -= dot * cls.center[k];
      } while (norm(u) < 1e-9);
      normalize(u);
      const double a = spec.false_positive_alignment;
      const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
      for (std::size_t k = 0; k < dim; ++k) clean[k] = a * cls.center[k] + b * u[k];
    }
    std::vector<double> e(dim);
    for (std::size_t k = 0; k < dim; ++k) e[k] = clean[k] + spec.noise_sigma * gauss(rng);
    if (norm(e) == 0.0) e = clean;
    normalize(e);
    return e;
  };
  auto observed_label = [&](const std::string& truth) {
    if (spec.corruption_rate <= 0.0 || unit(rng) >= spec.corruption_rate) return truth;
    std::vector<const std::string*> others;
    for (const auto& l : vocabulary) {
      if (l != truth) others.push_back(&l);
    }
    return *others[static_cast<std::size_t>(unit(rng) * others.size()) % others.size()];
  };

  SyntheticDataset out;
  out.detections.dimension = dim;
  out.detections.label_set = LabelSet(vocabulary);
  std::size_t next_id = 0;

  auto emit = [&](const std::string& frame_id, const SyntheticClass& cls,
                  const BoundingBox& box, bool false_positive) {
    DetectedObject o;
    o.object_id = padded('o', next_id++, 4);
    o.frame_id = frame_id;
    o.box = box;
    o.embedding = embed(cls, false_positive);
    o.label = observed_label(cls.label);
    o.confidence = uniform(spec.min_confidence, spec.max_confidence);
    if (!false_positive) out.ground_truth.push_back({frame_id, box, cls.label});
    out.true_class.push_back(cls.label);
    out.off_door_false_positive.push_back(false_positive);
    out.detections.objects.push_back(std::move(o));
  };

  const double w = spec.door_width;
  const double h = spec.door_height;
  const double half = 0.5 * spec.opener_size;
  for (std::size_t f = 0; f < num_frames; ++f) {
    const std::string frame_id = padded('f', f, 3);
    const double x0 = uniform(0.25 * w, 2.0 * w);
    const double y0 = uniform(0.05 * h, 0.2 * h);
    const BoundingBox door{x0, y0, x0 + w, y0 + h};
    emit(frame_id, *door_class, door, false);

    std::size_t slot = 0;
    for (const auto& s : frames[f]) {
      double cx = 0.0;
      double cy = 0.0;
      if (s.false_positive) {
        // Right of the door, at least 0.6 door widths from its edge.
        cx = door.x_max + w * uniform(0.6, 2.0);
        cy = uniform(door.y_min, door.y_max);
      } else {
        const bool right = slot % 2 == 1;
        const std::size_t level = slot / 2;
        const double sign = level % 2 == 0 ? -1.0 : 1.0;
        const double offset = sign * (0.06 + 0.08 * static_cast<double>(level / 2)) * h;
        cx = (right ? door.x_max : door.x_min) + uniform(-0.05, 0.05) * w;
        cy = door.center_y() + offset + uniform(-0.02, 0.02) * h;
        ++slot;
      }
      emit(frame_id, *s.cls, BoundingBox{cx - half, cy - half, cx + half, cy + half},
           s.false_positive);
    }
  }
  return out;
}

SyntheticSpec door_opening_spec(std::size_t dimension, std::uint64_t seed) {
  auto centers = random_unit_centers(4, dimension, seed);
  SyntheticSpec spec;
  spec.classes = {{"door", centers[0], 75},
                  {"handle", centers[1], 75},
                  {"push bar", centers[2], 50},
                  {"button", centers[3], 50}};
  spec.extra_labels = {"knob"};
  spec.noise_sigma = 0.08;
  spec.corruption_rate = 0.4;
  spec.door_label = "door";
  spec.off_door_false_positives = 50;
  return spec;
}

std::vector<LabelAssignment> pick_exemplars(
    const SyntheticDataset& dataset,
    const std::vector<std::pair<std::string, std::size_t>>& per_class) {
  const auto& objects = dataset.detections.objects;
  std::vector<LabelAssignment> picks;
  for (const auto& [label, k] : per_class) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      if (dataset.true_class[i] == label && !dataset.off_door_false_positive[i]) {
        members.push_back(i);
      }
    }
    if (members.size() < k) {
      throw Error(ErrorCode::kInvalidSpec, "class '" + label + "' has fewer than " +
                                               std::to_string(k) + " instances");
    }
    std::vector<double> mean(dataset.detections.dimension, 0.0);
    for (auto i : members) {
      for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += objects[i].embedding[d];
    }
    normalize(mean);
    std::vector<double> score(objects.size(), 0.0);
    for (auto i : members) {
      const auto& e = objects[i].embedding;
      score[i] = std::inner_product(e.begin(), e.end(), mean.begin(), 0.0) / norm(e);
    }
    std::stable_sort(members.begin(), members.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    for (std::size_t j = 0; j < k; ++j) picks.push_back({objects[members[j]].object_id, label});
  }
  return picks;
}

}  // namespace afford::synth
