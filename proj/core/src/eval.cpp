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

#include "afford/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "afford/error.hpp"
#include "io_util.hpp"

namespace afford::eval {

using detail::Json;
using detail::OrderedJson;

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

namespace {

// Confidence descending, object_id ascending.
void rank(std::vector<std::size_t>& order, std::span<const Prediction> predictions) {
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = predictions[a];
    const auto& pb = predictions[b];
    if (pa.confidence != pb.confidence) return pa.confidence > pb.confidence;
    if (pa.object_id != pb.object_id) return pa.object_id < pb.object_id;
    return a < b;
  });
}

}  // namespace

MatchResult match_detections(std::span<const Prediction> predictions,
                             std::span<const GroundTruthObject> ground_truth,
                             double iou_threshold) {
  using Key = std::pair<std::string, std::string>;  // (label, frame)
  std::map<Key, std::vector<std::size_t>> preds_by_key;
  std::map<Key, std::vector<std::size_t>> gt_by_key;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    preds_by_key[{predictions[i].label, predictions[i].frame_id}].push_back(i);
  }
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    gt_by_key[{ground_truth[i].label, ground_truth[i].frame_id}].push_back(i);
  }

  MatchResult result;
  result.true_positive.assign(predictions.size(), false);
  std::vector<bool> gt_matched(ground_truth.size(), false);
  for (auto& [key, order] : preds_by_key) {
    auto gts = gt_by_key.find(key);
    if (gts == gt_by_key.end()) continue;
    rank(order, predictions);
    for (std::size_t p : order) {
      std::optional<std::size_t> best;
      double best_iou = iou_threshold;
      for (std::size_t g : gts->second) {
        if (gt_matched[g]) continue;
        const double overlap = iou(predictions[p].box, ground_truth[g].box);
        if (overlap >= best_iou && (!best || overlap > best_iou)) {
          best = g;
          best_iou = overlap;
        }
      }
      if (best) {
        gt_matched[*best] = true;
        result.true_positive[p] = true;
      }
    }
  }
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    auto& fn = result.false_negatives[ground_truth[g].label];
    if (!gt_matched[g]) ++fn;
  }
  return result;
}

double average_precision(const std::vector<bool>& ranked_true_positive,
                         std::size_t num_ground_truth) {
  if (num_ground_truth == 0) return 0.0;
  const std::size_t n = ranked_true_positive.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (ranked_true_positive[k]) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_ground_truth);
  }
  for (std::size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double ap = 0.0;
  double previous_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ap += (recall[k] - previous_recall) * precision[k];
    previous_recall = recall[k];
  }
  return ap;
}

EvalReport evaluate(std::span<const Prediction> predictions,
                    std::span<const GroundTruthObject> ground_truth,
                    double iou_threshold) {
  const MatchResult match = match_detections(predictions, ground_truth, iou_threshold);
  EvalReport report;
  report.iou_threshold = iou_threshold;

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < predictions.size(); ++i) by_class[predictions[i].label].push_back(i);
  for (const auto& g : ground_truth) {
    by_class.try_emplace(g.label);
    ++report.counts[g.label].ground_truth;
  }

  double sum = 0.0;
  for (auto& [label, order] : by_class) {
    rank(order, predictions);
    std::vector<bool> ranked;
    ranked.reserve(order.size());
    auto& counts = report.counts[label];
    for (std::size_t i : order) {
      ranked.push_back(match.true_positive[i]);
      if (match.true_positive[i]) {
        ++counts.true_positives;
      } else {
        ++counts.false_positives;
      }
    }
    if (auto fn = match.false_negatives.find(label); fn != match.false_negatives.end()) {
      counts.false_negatives = fn->second;
    }
    if (counts.ground_truth == 0) continue;
    const double ap = average_precision(ranked, counts.ground_truth);
    report.per_class_ap[label] = ap;
    sum += ap;
  }
  if (!report.per_class_ap.empty()) {
    report.map_score = sum / static_cast<double>(report.per_class_ap.size());
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  OrderedJson root;
  root["per_class_ap"] = OrderedJson::object();
  for (const auto& [label, ap] : report.per_class_ap) root["per_class_ap"][label] = ap;
  root["map_score"] = report.map_score;
  root["iou_threshold"] = report.iou_threshold;
  root["counts"] = OrderedJson::object();
  for (const auto& [label, c] : report.counts) {
    root["counts"][label] = {{"true_positives", c.true_positives},
                             {"false_positives", c.false_positives},
                             {"false_negatives", c.false_negatives},
                             {"ground_truth", c.ground_truth}};
  }
  return root.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view json_text) {
  const Json root = detail::parse_json(json_text, "evaluation report");
  EvalReport report;
  const Json& aps = detail::require(root, "per_class_ap", "evaluation report");
  if (!aps.is_object()) throw Error(ErrorCode::kSchemaError, "per_class_ap must be an object");
  for (const auto& [label, ap] : aps.items()) {
    if (!ap.is_number()) throw Error(ErrorCode::kSchemaError, "AP values must be numbers");
    report.per_class_ap[label] = ap.get<double>();
  }
  report.map_score = detail::require_number(root, "map_score", "evaluation report");
  report.iou_threshold = detail::require_number(root, "iou_threshold", "evaluation report");
  const Json& counts = detail::require(root, "counts", "evaluation report");
  if (!counts.is_object()) throw Error(ErrorCode::kSchemaError, "counts must be an object");
  for (const auto& [label, c] : counts.items()) {
    auto count = [&](const char* key) {
      const Json& v = detail::require(c, key, "class counts");
      if (!v.is_number_unsigned()) {
        throw Error(ErrorCode::kSchemaError, std::string(key) + " must be a count");
      }
      return v.get<std::size_t>();
    };
    report.counts[label] = {count("true_positives"), count("false_positives"),
                            count("false_negatives"), count("ground_truth")};
  }
  return report;
}

std::string reports_to_csv(
    const std::vector<std::pair<std::string, const EvalReport*>>& columns) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::set<std::string> classes;
  for (const auto& [name, report] : columns) {
    for (const auto& [label, ap] : report->per_class_ap) classes.insert(label);
  }
  std::string out = "label";
  for (const auto& [name, report] : columns) out += "," + quote(name);
  out += "\n";
  char buf[32];
  for (const auto& label : classes) {
    out += quote(label);
    for (const auto& [name, report] : columns) {
      auto it = report->per_class_ap.find(label);
      std::snprintf(buf, sizeof(buf), "%.6f", it == report->per_class_ap.end() ? 0.0 : it->second);
      out += ",";
      out += buf;
    }
    out += "\n";
  }
  out += "mAP";
  for (const auto& [name, report] : columns) {
    std::snprintf(buf, sizeof(buf), "%.6f", report->map_score);
    out += ",";
    out += buf;
  }
  return out + "\n";
}

std::vector<GroundTruthObject> load_ground_truth(const std::filesystem::path& path) {
  const Json root = detail::parse_json(detail::read_file(path), "ground truth");
  if (!root.is_array()) throw Error(ErrorCode::kSchemaError, "ground truth must be an array");
  std::vector<GroundTruthObject> out;
  for (const auto& j : root) {
    GroundTruthObject g;
    g.frame_id = detail::require_string(j, "frame_id", "ground truth");
    g.box = detail::box_from_json(detail::require(j, "box", "ground truth"), "ground truth");
    g.label = detail::require_string(j, "label", "ground truth");
    out.push_back(std::move(g));
  }
  return out;
}

void save_ground_truth(std::span<const GroundTruthObject> ground_truth,
                       const std::filesystem::path& path) {
  OrderedJson root = OrderedJson::array();
  for (const auto& g : ground_truth) {
    root.push_back(
        {{"frame_id", g.frame_id}, {"box", detail::box_to_json(g.box)}, {"label", g.label}});
  }
  detail::write_file(path, root.dump(2) + "\n");
}

}  // namespace afford::eval
