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

#ifndef AFFORD_PIPELINE_HPP_
#define AFFORD_PIPELINE_HPP_

// End-to-end flow: ingest -> project -> human labels -> relabel -> spatial
// verification -> evaluation, with sessions persisted as a directory of JSON
// and line-JSON artifacts.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afford/detection.hpp"
#include "afford/eval.hpp"
#include "afford/kb.hpp"
#include "afford/projection.hpp"
#include "afford/relabeler.hpp"
#include "afford/spatial.hpp"

namespace afford::pipeline {

enum class Stage { kIngested, kProjected, kLabeled, kRelabeled, kVerified, kEvaluated };

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view text);

struct ServiceConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;

  friend bool operator==(const ServiceConfig&, const ServiceConfig&) = default;
};

// Relative paths in a config file resolve against the file's directory.
// Empty paths mean "not configured".
struct PipelineConfig {
  std::string session_id = "session";
  std::filesystem::path detections_path;
  std::filesystem::path ground_truth_path;
  std::filesystem::path labels_path;
  std::filesystem::path knowledge_graph_path;
  std::filesystem::path spatial_rule_path;
  std::filesystem::path images_dir;
  std::optional<kb::EffectQuery> goal;
  projection::TsneParams tsne;
  double iou_threshold = 0.5;
  std::filesystem::path output_dir = "afford_out";
  ServiceConfig service;
};

PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);
std::string format_config(const PipelineConfig& config);
// Throws kInvalidConfig.
void validate_config(const PipelineConfig& config);

struct SessionState {
  std::string session_id;
  Stage stage = Stage::kIngested;
  DetectionSet detections;
  std::vector<eval::GroundTruthObject> ground_truth;
  std::optional<projection::ProjectionLayout> layout;
  std::map<std::string, std::string> assignments;
  std::optional<relabel::ExemplarStore> store;
  std::optional<std::vector<relabel::RelabeledObject>> relabeled;
  std::optional<std::vector<spatial::SpatialVerdict>> verdicts;
  // Final output: relabeled and spatially verified.
  std::optional<eval::EvalReport> report;
  // Raw detector labels, and relabeling without spatial verification.
  std::optional<eval::EvalReport> baseline_report;
  std::optional<eval::EvalReport> relabel_report;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

inline constexpr int kSessionFormatVersion = 1;

// Writes session.json plus one artifact file per reached stage.
void save_session(const SessionState& state, const std::filesystem::path& dir);
// Throws kIoError or kSchemaVersionMismatch.
SessionState load_session(const std::filesystem::path& dir);

// A kept object with the action chains that would realize the goal on it,
// ordered most confident first.
struct ActionableObject {
  std::string object_id;
  std::string frame_id;
  std::string label;
  double confidence = 0.0;
  std::vector<kb::ActionMatch> actions;
};

// Stage implementations shared by batch and service mode. Errors escaping a
// stage carry its name.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  const PipelineConfig& config() const noexcept { return config_; }
  const spatial::SpatialRule& rule() const noexcept { return rule_; }
  const std::optional<kb::AffordanceGraph>& graph() const noexcept {
    return graph_;
  }

  // Detector vocabulary for the configured goal, if a graph and goal exist.
  std::optional<LabelSet> goal_label_set() const;

  SessionState ingest() const;
  projection::ProjectionLayout compute_layout(const DetectionSet& detections) const;
  void attach_layout(SessionState& state, projection::ProjectionLayout layout) const;
  void project(SessionState& state) const;
  // Merges (or with labels.replace, replaces) assignments and drops every
  // artifact past the labeled stage.
  void apply_labels(SessionState& state, const relabel::LabelsFile& labels) const;
  void relabel(SessionState& state) const;
  void verify(SessionState& state) const;
  void evaluate(SessionState& state) const;
  // apply_labels followed by relabel, verify and evaluate.
  void submit_labels(SessionState& state, const relabel::LabelsFile& labels) const;

  std::vector<ActionableObject> actionable_objects(const SessionState& state) const;

  // save_session plus the derived prompt.txt and actions.json.
  void write_artifacts(const SessionState& state,
                       const std::filesystem::path& dir) const;

 private:
  PipelineConfig config_;
  spatial::SpatialRule rule_;
  std::optional<kb::AffordanceGraph> graph_;
};

// Runs every stage with the configured labels file and writes all artifacts
// to config.output_dir.
eval::EvalReport run_batch(const PipelineConfig& config);

}  // namespace afford::pipeline

#endif  // AFFORD_PIPELINE_HPP_
