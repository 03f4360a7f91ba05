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

#include "afford/pipeline.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "afford/error.hpp"
#include "io_util.hpp"

namespace afford::pipeline {

namespace fs = std::filesystem;
using detail::Json;
using detail::OrderedJson;

namespace {

constexpr std::array<std::string_view, 6> kStageNames = {
    "ingested", "projected", "labeled", "relabeled", "verified", "evaluated"};

// Artifact file names inside a session directory.
constexpr const char* kSessionFile = "session.json";
constexpr const char* kDetectionsFile = "detections.jsonl";
constexpr const char* kGroundTruthFile = "ground_truth.json";
constexpr const char* kProjectionFile = "projection.json";
constexpr const char* kLabelsFile = "labels.json";
constexpr const char* kRelabelFile = "relabel.jsonl";
constexpr const char* kVerdictsFile = "verdicts.json";
constexpr const char* kReportFile = "report.json";
constexpr const char* kBaselineReportFile = "baseline_report.json";
constexpr const char* kRelabelReportFile = "relabel_report.json";
constexpr const char* kReportCsvFile = "report.csv";
constexpr const char* kPromptFile = "prompt.txt";
constexpr const char* kActionsFile = "actions.json";

template <typename F>
auto in_stage(Stage stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(std::string(to_string(stage)));
  }
}

void require_stage(const SessionState& state, Stage needed, Stage running) {
  if (state.stage < needed) {
    throw Error(ErrorCode::kStageNotReached,
                std::string(to_string(running)) + " needs stage " +
                    std::string(to_string(needed)) + ", session is at " +
                    std::string(to_string(state.stage)));
  }
}

fs::path resolve(const Json& root, const char* key, const fs::path& base) {
  std::string value = detail::optional_string(root, key, "config");
  if (value.empty()) return {};
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

std::vector<eval::Prediction> to_predictions(std::span<const spatial::SpatialObject> objects) {
  std::vector<eval::Prediction> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back({o.object_id, o.frame_id, o.box, o.label, o.confidence});
  return out;
}

std::vector<spatial::SpatialObject> spatial_view(
    std::span<const relabel::RelabeledObject> relabeled) {
  std::vector<spatial::SpatialObject> out;
  out.reserve(relabeled.size());
  for (const auto& r : relabeled) out.push_back(spatial::to_spatial(r));
  return out;
}

void put_or_remove(const fs::path& path, bool present, const std::string& content) {
  if (present) {
    detail::write_file(path, content);
  } else {
    std::error_code ec;
    fs::remove(path, ec);
  }
}

}  // namespace

std::string_view to_string(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

Stage stage_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == text) return static_cast<Stage>(i);
  }
  throw Error(ErrorCode::kSchemaError, "unknown stage '" + std::string(text) + "'");
}

// --- config ---------------------------------------------------------------

PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  const Json root = detail::parse_json(json_text, "config");
  if (!root.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  PipelineConfig c;
  if (auto id = detail::optional_string(root, "session_id", "config"); !id.empty()) {
    c.session_id = id;
  }
  c.detections_path = resolve(root, "detections_path", base_dir);
  c.ground_truth_path = resolve(root, "ground_truth_path", base_dir);
  c.labels_path = resolve(root, "labels_path", base_dir);
  c.knowledge_graph_path = resolve(root, "knowledge_graph_path", base_dir);
  c.spatial_rule_path = resolve(root, "spatial_rule_path", base_dir);
  c.images_dir = resolve(root, "images_dir", base_dir);
  if (auto out = resolve(root, "output_dir", base_dir); !out.empty()) c.output_dir = out;
  if (auto it = root.find("goal"); it != root.end() && !it->is_null()) {
    c.goal = kb::EffectQuery{detail::require_string(*it, "object", "config goal"),
                             detail::require_string(*it, "effect", "config goal")};
  }
  if (auto it = root.find("tsne"); it != root.end()) {
    const Json& t = *it;
    auto num = [&](const char* key, auto& field) {
      if (auto f = t.find(key); f != t.end()) {
        if (!f->is_number()) {
          throw Error(ErrorCode::kInvalidConfig, std::string("tsne.") + key + " must be a number");
        }
        field = f->get<std::remove_reference_t<decltype(field)>>();
      }
    };
    num("perplexity", c.tsne.perplexity);
    num("iterations", c.tsne.iterations);
    num("early_exaggeration_factor", c.tsne.early_exaggeration_factor);
    num("early_exaggeration_iters", c.tsne.early_exaggeration_iters);
    num("learning_rate", c.tsne.learning_rate);
    num("initial_momentum", c.tsne.initial_momentum);
    num("final_momentum", c.tsne.final_momentum);
    num("momentum_switch_iter", c.tsne.momentum_switch_iter);
    num("seed", c.tsne.seed);
  }
  if (root.contains("iou_threshold")) {
    c.iou_threshold = detail::require_number(root, "iou_threshold", "config");
  }
  if (auto it = root.find("service"); it != root.end()) {
    if (auto addr = detail::optional_string(*it, "bind_address", "config service"); !addr.empty()) {
      c.service.bind_address = addr;
    }
    if (it->contains("port")) {
      c.service.port = static_cast<int>(detail::require_number(*it, "port", "config service"));
    }
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  PipelineConfig c = parse_config(detail::read_file(path), path.parent_path());
  validate_config(c);
  return c;
}

std::string format_config(const PipelineConfig& c) {
  OrderedJson root;
  root["session_id"] = c.session_id;
  auto path = [&](const char* key, const fs::path& p) {
    if (!p.empty()) root[key] = p.generic_string();
  };
  path("detections_path", c.detections_path);
  path("ground_truth_path", c.ground_truth_path);
  path("labels_path", c.labels_path);
  path("knowledge_graph_path", c.knowledge_graph_path);
  path("spatial_rule_path", c.spatial_rule_path);
  path("images_dir", c.images_dir);
  if (c.goal) root["goal"] = {{"object", c.goal->object}, {"effect", c.goal->property_or_verb}};
  root["tsne"] = {{"perplexity", c.tsne.perplexity},
                  {"iterations", c.tsne.iterations},
                  {"early_exaggeration_factor", c.tsne.early_exaggeration_factor},
                  {"early_exaggeration_iters", c.tsne.early_exaggeration_iters},
                  {"learning_rate", c.tsne.learning_rate},
                  {"initial_momentum", c.tsne.initial_momentum},
                  {"final_momentum", c.tsne.final_momentum},
                  {"momentum_switch_iter", c.tsne.momentum_switch_iter},
                  {"seed", c.tsne.seed}};
  root["iou_threshold"] = c.iou_threshold;
  root["output_dir"] = c.output_dir.generic_string();
  root["service"] = {{"bind_address", c.service.bind_address}, {"port", c.service.port}};
  return root.dump(2) + "\n";
}

void validate_config(const PipelineConfig& c) {
  if (c.detections_path.empty()) throw Error(ErrorCode::kInvalidConfig, "detections_path is required");
  if (!(c.iou_threshold > 0.0 && c.iou_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "iou_threshold must lie in (0, 1]");
  }
  if (c.service.port < 0 || c.service.port > 65535) {
    throw Error(ErrorCode::kInvalidConfig, "service port out of range");
  }
  if (c.session_id.empty()) throw Error(ErrorCode::kInvalidConfig, "session_id is empty");
  try {
    projection::validate_params(c.tsne);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, "tsne: " + e.detail());
  }
}

// --- session persistence --------------------------------------------------

void save_session(const SessionState& state, const fs::path& dir) {
  const bool labeled = state.stage >= Stage::kLabeled;
  OrderedJson manifest{{"format_version", kSessionFormatVersion},
                       {"session_id", state.session_id},
                       {"stage", std::string(to_string(state.stage))}};
  detail::write_file(dir / kSessionFile, manifest.dump(2) + "\n");
  detail::write_file(dir / kDetectionsFile, format_detections(state.detections));
  if (state.ground_truth.empty()) {
    put_or_remove(dir / kGroundTruthFile, false, "");
  } else {
    eval::save_ground_truth(state.ground_truth, dir / kGroundTruthFile);
  }
  put_or_remove(dir / kProjectionFile, state.layout.has_value(),
                state.layout ? projection::layout_to_json(*state.layout) : "");

  relabel::LabelsFile labels{state.session_id, {}, false};
  for (const auto& [id, label] : state.assignments) labels.assignments.push_back({id, label});
  put_or_remove(dir / kLabelsFile, labeled, relabel::format_labels(labels));
  put_or_remove(dir / kRelabelFile, state.relabeled.has_value(),
                state.relabeled ? relabel::format_relabeled(state.detections, *state.relabeled) : "");
  put_or_remove(dir / kVerdictsFile, state.verdicts.has_value(),
                state.verdicts ? spatial::verdicts_to_json(*state.verdicts) : "");
  put_or_remove(dir / kReportFile, state.report.has_value(),
                state.report ? eval::report_to_json(*state.report) : "");
  put_or_remove(dir / kBaselineReportFile, state.baseline_report.has_value(),
                state.baseline_report ? eval::report_to_json(*state.baseline_report) : "");
  put_or_remove(dir / kRelabelReportFile, state.relabel_report.has_value(),
                state.relabel_report ? eval::report_to_json(*state.relabel_report) : "");
  const bool all_reports = state.report && state.baseline_report && state.relabel_report;
  put_or_remove(dir / kReportCsvFile, all_reports,
                all_reports ? eval::reports_to_csv({{"baseline", &*state.baseline_report},
                                                    {"relabeled", &*state.relabel_report},
                                                    {"verified", &*state.report}})
                            : "");
}

SessionState load_session(const fs::path& dir) {
  const fs::path manifest_path = dir / kSessionFile;
  std::error_code ec;
  if (!fs::is_regular_file(manifest_path, ec)) {
    throw Error(ErrorCode::kIoError, "no session in " + dir.string());
  }
  const Json manifest = detail::parse_json(detail::read_file(manifest_path), "session manifest");
  const Json& version = detail::require(manifest, "format_version", "session manifest");
  if (!version.is_number_integer()) {
    throw Error(ErrorCode::kSchemaError, "session format_version must be an integer");
  }
  if (version.get<int>() != kSessionFormatVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "session format_version " + version.dump() + ", this build reads " +
                    std::to_string(kSessionFormatVersion));
  }
  SessionState state;
  state.session_id = detail::require_string(manifest, "session_id", "session manifest");
  state.stage = stage_from_string(detail::require_string(manifest, "stage", "session manifest"));
  auto needs = [&](Stage stage, const char* file) {
    const bool exists = fs::is_regular_file(dir / file, ec);
    if (state.stage >= stage && !exists) {
      throw Error(ErrorCode::kIoError, std::string("session at stage ") +
                                           std::string(to_string(state.stage)) + " lacks " + file);
    }
    return exists;
  };

  state.detections = ingest_detections(dir / kDetectionsFile);
  if (fs::is_regular_file(dir / kGroundTruthFile, ec)) {
    state.ground_truth = eval::load_ground_truth(dir / kGroundTruthFile);
  }
  if (needs(Stage::kProjected, kProjectionFile)) {
    state.layout = projection::layout_from_json(detail::read_file(dir / kProjectionFile));
  }
  if (needs(Stage::kLabeled, kLabelsFile) && state.stage >= Stage::kLabeled) {
    const auto labels = relabel::load_labels(dir / kLabelsFile);
    for (const auto& a : relabel::canonical_assignments(labels.assignments)) {
      state.assignments[a.object_id] = a.label;
    }
    state.store = relabel::build_store(state.detections, labels.assignments);
  }
  if (needs(Stage::kRelabeled, kRelabelFile) && state.stage >= Stage::kRelabeled) {
    state.relabeled = relabel::parse_relabeled(detail::read_file(dir / kRelabelFile));
  }
  if (needs(Stage::kVerified, kVerdictsFile) && state.stage >= Stage::kVerified) {
    state.verdicts = spatial::verdicts_from_json(detail::read_file(dir / kVerdictsFile));
  }
  if (needs(Stage::kEvaluated, kReportFile) && state.stage >= Stage::kEvaluated) {
    state.report = eval::report_from_json(detail::read_file(dir / kReportFile));
    if (fs::is_regular_file(dir / kBaselineReportFile, ec)) {
      state.baseline_report = eval::report_from_json(detail::read_file(dir / kBaselineReportFile));
    }
    if (fs::is_regular_file(dir / kRelabelReportFile, ec)) {
      state.relabel_report = eval::report_from_json(detail::read_file(dir / kRelabelReportFile));
    }
  }
  return state;
}

// --- stages ---------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  validate_config(config_);
  rule_ = config_.spatial_rule_path.empty() ? spatial::default_door_rule()
                                            : spatial::load_rule(config_.spatial_rule_path);
  if (!config_.knowledge_graph_path.empty()) graph_ = kb::load_graph(config_.knowledge_graph_path);
}

std::optional<LabelSet> Pipeline::goal_label_set() const {
  if (!graph_ || !config_.goal) return std::nullopt;
  return kb::label_set_for_goal(*graph_, *config_.goal);
}

SessionState Pipeline::ingest() const {
  return in_stage(Stage::kIngested, [&] {
    SessionState state;
    state.session_id = config_.session_id;
    state.stage = Stage::kIngested;
    if (auto vocabulary = goal_label_set()) {
      state.detections = make_file_detector(config_.detections_path)->detect(*vocabulary);
    } else {
      state.detections = ingest_detections(config_.detections_path);
    }
    if (!config_.ground_truth_path.empty()) {
      state.ground_truth = eval::load_ground_truth(config_.ground_truth_path);
    }
    return state;
  });
}

projection::ProjectionLayout Pipeline::compute_layout(const DetectionSet& detections) const {
  return in_stage(Stage::kProjected,
                  [&] { return projection::tsne_project(detections, config_.tsne); });
}

void Pipeline::attach_layout(SessionState& state, projection::ProjectionLayout layout) const {
  state.layout = std::move(layout);
  if (state.stage < Stage::kProjected) state.stage = Stage::kProjected;
}

void Pipeline::project(SessionState& state) const {
  attach_layout(state, compute_layout(state.detections));
}

void Pipeline::apply_labels(SessionState& state, const relabel::LabelsFile& labels) const {
  in_stage(Stage::kLabeled, [&] {
    require_stage(state, Stage::kProjected, Stage::kLabeled);
    if (!labels.session_id.empty() && labels.session_id != state.session_id) {
      throw Error(ErrorCode::kSessionMismatch, "labels for session '" + labels.session_id +
                                                   "' sent to session '" + state.session_id + "'");
    }
    auto merged = labels.replace ? std::map<std::string, std::string>{} : state.assignments;
    for (const auto& a : labels.assignments) merged[a.object_id] = a.label;
    std::vector<LabelAssignment> list;
    for (const auto& [id, label] : merged) list.push_back({id, label});
    auto store = relabel::build_store(state.detections, list);  // validates ids

    state.assignments = std::move(merged);
    state.store = std::move(store);
    state.relabeled.reset();
    state.verdicts.reset();
    state.report.reset();
    state.baseline_report.reset();
    state.relabel_report.reset();
    state.stage = Stage::kLabeled;
  });
}

void Pipeline::relabel(SessionState& state) const {
  in_stage(Stage::kRelabeled, [&] {
    require_stage(state, Stage::kLabeled, Stage::kRelabeled);
    state.relabeled = relabel::relabel_set(state.detections, *state.store);
    state.stage = Stage::kRelabeled;
  });
}

void Pipeline::verify(SessionState& state) const {
  in_stage(Stage::kVerified, [&] {
    require_stage(state, Stage::kRelabeled, Stage::kVerified);
    const auto objects = spatial_view(*state.relabeled);
    state.verdicts = spatial::verify(objects, rule_);
    state.stage = Stage::kVerified;
  });
}

void Pipeline::evaluate(SessionState& state) const {
  in_stage(Stage::kEvaluated, [&] {
    require_stage(state, Stage::kVerified, Stage::kEvaluated);
    std::vector<spatial::SpatialObject> raw;
    raw.reserve(state.detections.objects.size());
    for (const auto& o : state.detections.objects) raw.push_back(spatial::to_spatial(o));
    const auto relabeled = spatial_view(*state.relabeled);
    const auto kept = spatial::filter_kept(relabeled, *state.verdicts);

    const double t = config_.iou_threshold;
    state.baseline_report = eval::evaluate(to_predictions(raw), state.ground_truth, t);
    state.relabel_report = eval::evaluate(to_predictions(relabeled), state.ground_truth, t);
    state.report = eval::evaluate(to_predictions(kept), state.ground_truth, t);
    state.stage = Stage::kEvaluated;
  });
}

void Pipeline::submit_labels(SessionState& state, const relabel::LabelsFile& labels) const {
  apply_labels(state, labels);
  relabel(state);
  verify(state);
  evaluate(state);
}

std::vector<ActionableObject> Pipeline::actionable_objects(const SessionState& state) const {
  std::vector<ActionableObject> out;
  if (!graph_ || !config_.goal || !state.relabeled || !state.verdicts) return out;
  const auto matches = kb::query_actions_for_effect(*graph_, *config_.goal);
  const auto kept = spatial::filter_kept(spatial_view(*state.relabeled), *state.verdicts);
  for (const auto& o : kept) {
    ActionableObject a{o.object_id, o.frame_id, o.label, o.confidence, {}};
    for (const auto& m : matches) {
      const kb::Entity* target = graph_->find_entity(m.direct_object);
      if (target != nullptr && detail::iequals(target->name, o.label)) a.actions.push_back(m);
    }
    if (!a.actions.empty()) out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(), [](const ActionableObject& a, const ActionableObject& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.object_id < b.object_id;
  });
  return out;
}

void Pipeline::write_artifacts(const SessionState& state, const fs::path& dir) const {
  save_session(state, dir);
  const auto vocabulary = goal_label_set();
  put_or_remove(dir / kPromptFile, vocabulary.has_value(),
                vocabulary ? build_prompt(*vocabulary) + "\n" : "");
  const bool actionable = vocabulary && state.stage >= Stage::kVerified;
  OrderedJson list = OrderedJson::array();
  if (actionable) {
    for (const auto& a : actionable_objects(state)) {
      OrderedJson actions = OrderedJson::array();
      for (const auto& m : a.actions) {
        OrderedJson steps = OrderedJson::array();
        for (const auto& s : m.chain.steps) {
          OrderedJson step{{"verb", s.verb}, {"direct_object", s.direct_object}};
          if (s.indirect_object) step["indirect_object"] = *s.indirect_object;
          if (s.agent) step["agent"] = *s.agent;
          steps.push_back(std::move(step));
        }
        actions.push_back({{"affordance_id", m.affordance_id},
                           {"steps", std::move(steps)},
                           {"probability", m.probability}});
      }
      list.push_back({{"object_id", a.object_id},
                      {"frame_id", a.frame_id},
                      {"label", a.label},
                      {"confidence", a.confidence},
                      {"actions", std::move(actions)}});
    }
  }
  put_or_remove(dir / kActionsFile, actionable, list.dump(2) + "\n");
}

eval::EvalReport run_batch(const PipelineConfig& config) {
  const Pipeline pipeline(config);
  const fs::path& out = config.output_dir;
  SessionState state = pipeline.ingest();
  pipeline.write_artifacts(state, out);
  pipeline.project(state);
  pipeline.write_artifacts(state, out);

  const auto labels = in_stage(Stage::kLabeled, [&] {
    if (config.labels_path.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "batch mode needs labels_path");
    }
    return relabel::load_labels(config.labels_path);
  });
  pipeline.apply_labels(state, labels);
  pipeline.write_artifacts(state, out);
  pipeline.relabel(state);
  pipeline.write_artifacts(state, out);
  pipeline.verify(state);
  pipeline.write_artifacts(state, out);
  pipeline.evaluate(state);
  pipeline.write_artifacts(state, out);
  return *state.report;
}

}  // namespace afford::pipeline
