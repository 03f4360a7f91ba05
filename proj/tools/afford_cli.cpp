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

// afford: command-line front end for the affordance pipeline.

#include <algorithm>
#include <cstdint>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "afford/error.hpp"
#include "afford/pipeline.hpp"
#include "afford/service.hpp"
#include "afford/synthetic.hpp"
#include "afford/thumbnail.hpp"

namespace fs = std::filesystem;
using namespace afford;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
};

pipeline::PipelineConfig resolve_config(const GlobalOptions& g) {
  if (g.config.empty()) throw Error(ErrorCode::kInvalidConfig, "--config is required");
  auto config = pipeline::load_config(g.config);
  if (g.seed) config.tsne.seed = *g.seed;
  if (!g.output.empty()) config.output_dir = g.output;
  return config;
}

pipeline::SessionState resume(const pipeline::Pipeline& p) {
  return pipeline::load_session(p.config().output_dir);
}

void print_reports(const pipeline::SessionState& s) {
  auto line = [](const char* name, const std::optional<eval::EvalReport>& r) {
    if (r) std::cout << name << " mAP " << r->map_score << "\n";
  };
  line("baseline ", s.baseline_report);
  line("relabeled", s.relabel_report);
  line("verified ", s.report);
}

void copy_fixture(const fs::path& data_dir, const fs::path& relative, const fs::path& target) {
  const fs::path source = data_dir / relative;
  std::error_code ec;
  fs::copy_file(source, target, fs::copy_options::overwrite_existing, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot copy " + source.string() + ": " + ec.message());
}

// Flat-colored boxes on a gray background, one PNG per frame.
void render_frames(const synth::SyntheticDataset& ds, const fs::path& dir) {
  static const std::map<std::string, std::array<std::uint8_t, 3>> kColors = {
      {"door", {150, 110, 70}}, {"handle", {220, 220, 60}}, {"push bar", {60, 160, 220}},
      {"button", {220, 70, 70}}, {"knob", {120, 220, 120}}};
  std::map<std::string, std::vector<std::size_t>> frames;
  for (std::size_t i = 0; i < ds.detections.objects.size(); ++i) {
    frames[ds.detections.objects[i].frame_id].push_back(i);
  }
  for (const auto& [frame, members] : frames) {
    double w = 0.0, h = 0.0;
    for (auto i : members) {
      w = std::max(w, ds.detections.objects[i].box.x_max);
      h = std::max(h, ds.detections.objects[i].box.y_max);
    }
    const int width = static_cast<int>(w) + 40, height = static_cast<int>(h) + 40;
    std::string rgb(static_cast<std::size_t>(width) * height * 3, static_cast<char>(200));
    // Doors first so openers paint on top.
    std::vector<std::size_t> order = members;
    std::stable_partition(order.begin(), order.end(),
                          [&](std::size_t i) { return ds.true_class[i] == "door"; });
    for (auto i : order) {
      const auto& box = ds.detections.objects[i].box;
      const auto color = kColors.count(ds.true_class[i]) ? kColors.at(ds.true_class[i])
                                                         : std::array<std::uint8_t, 3>{0, 0, 0};
      for (int y = std::max(0, static_cast<int>(box.y_min)); y < std::min(height, static_cast<int>(box.y_max)); ++y) {
        for (int x = std::max(0, static_cast<int>(box.x_min)); x < std::min(width, static_cast<int>(box.x_max)); ++x) {
          std::copy(color.begin(), color.end(), rgb.begin() + (static_cast<std::size_t>(y) * width + x) * 3);
        }
      }
    }
    thumbnail::write_png(dir / (frame + ".png"), width, height, rgb);
  }
}

void run_synth(const GlobalOptions& g, std::size_t dimension, bool images, const std::string& data_dir) {
  const std::uint64_t seed = g.seed.value_or(42);
  const fs::path out = g.output.empty() ? fs::path("afford_demo") : fs::path(g.output);
  fs::create_directories(out);

  const auto ds = synth::generate_synthetic(synth::door_opening_spec(dimension, seed), seed);
  write_detections(ds.detections, out / "detections.jsonl");
  eval::save_ground_truth(ds.ground_truth, out / "ground_truth.json");
  relabel::LabelsFile labels{"demo",
                             synth::pick_exemplars(ds, {{"door", 3}, {"handle", 2}, {"push bar", 1}, {"button", 1}}),
                             false};
  std::ofstream(out / "labels.json") << relabel::format_labels(labels);
  copy_fixture(data_dir, "kb/door_opening.json", out / "door_opening.json");
  copy_fixture(data_dir, "rules/door_openers.json", out / "door_openers.json");

  pipeline::PipelineConfig config;
  config.session_id = "demo";
  config.detections_path = "detections.jsonl";
  config.ground_truth_path = "ground_truth.json";
  config.labels_path = "labels.json";
  config.knowledge_graph_path = "door_opening.json";
  config.spatial_rule_path = "door_openers.json";
  config.goal = kb::EffectQuery{"door", "accessibility"};
  config.tsne.seed = seed;
  config.output_dir = "session";
  if (images) {
    fs::create_directories(out / "frames");
    render_frames(ds, out / "frames");
    config.images_dir = "frames";
  }
  std::ofstream(out / "config.json") << pipeline::format_config(config);

  std::size_t false_positives = std::count(ds.off_door_false_positive.begin(),
                                           ds.off_door_false_positive.end(), true);
  std::cout << "wrote " << ds.detections.objects.size() << " detections (" << false_positives
            << " off-door false positives), " << labels.assignments.size() << " exemplar labels to "
            << out.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affordance-driven detection refinement: ingest, project, relabel, verify, evaluate"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "Pipeline config JSON");
  app.add_option("--seed", g.seed, "Random seed (overrides the config's t-SNE seed)");
  app.add_option("--output", g.output, "Output directory (overrides the config's output_dir)");

  auto* ingest = app.add_subcommand("ingest", "Read detections and start a session");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic door-opening workspace");
  std::size_t dimension = 32;
  bool images = false;
  std::string data_dir = AFFORD_DATA_DIR;
  synth->add_option("--dim", dimension, "Embedding dimension")->check(CLI::Range(2, 4096));
  synth->add_flag("--images", images, "Also render one PNG per frame for thumbnails");
  synth->add_option("--data-dir", data_dir, "Directory holding kb/ and rules/ fixtures");
  auto* project = app.add_subcommand("project", "Compute the 2D t-SNE layout");
  auto* relabel_cmd = app.add_subcommand("relabel", "Apply human labels and relabel every object");
  std::string labels_path;
  relabel_cmd->add_option("--labels", labels_path, "Labels JSON (defaults to the config's labels_path)");
  auto* verify = app.add_subcommand("verify", "Spatially verify relabeled openers");
  auto* evaluate = app.add_subcommand("evaluate", "Score baseline, relabeled and verified output");
  auto* run = app.add_subcommand("run", "Run every stage in batch mode");
  auto* serve = app.add_subcommand("serve", "Serve the labeling session over HTTP");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      run_synth(g, dimension, images, data_dir);
      return 0;
    }
    const auto config = resolve_config(g);
    if (run->parsed()) {
      pipeline::run_batch(config);
      print_reports(pipeline::load_session(config.output_dir));
      std::cout << "artifacts in " << config.output_dir.string() << "\n";
      return 0;
    }
    if (serve->parsed()) {
      auto c = config;
      if (!host.empty()) c.service.bind_address = host;
      if (port >= 0) c.service.port = port;
      service::SessionService session(c);
      session.start_projection();
      std::cout << "serving session '" << c.session_id << "' on " << c.service.bind_address << ":"
                << c.service.port << std::endl;
      session.listen(c.service.bind_address, c.service.port);
      return 0;
    }

    const pipeline::Pipeline p(config);
    pipeline::SessionState state;
    if (ingest->parsed()) {
      state = p.ingest();
    } else {
      state = resume(p);
      if (project->parsed()) {
        p.project(state);
      } else if (relabel_cmd->parsed()) {
        const fs::path path = labels_path.empty() ? config.labels_path : fs::path(labels_path);
        if (path.empty()) throw Error(ErrorCode::kInvalidConfig, "no labels file given");
        p.apply_labels(state, relabel::load_labels(path));
        p.relabel(state);
      } else if (verify->parsed()) {
        p.verify(state);
      } else if (evaluate->parsed()) {
        p.evaluate(state);
      }
    }
    p.write_artifacts(state, config.output_dir);
    std::cout << "session '" << state.session_id << "' at stage " << pipeline::to_string(state.stage)
              << ", " << state.detections.objects.size() << " objects\n";
    if (evaluate->parsed()) print_reports(state);
    return 0;
  } catch (const Error& e) {
    std::cerr << "afford: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidConfig ? 2 : 1;
  }
}
