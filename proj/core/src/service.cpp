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

#include "afford/service.hpp"

#include <condition_variable>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "httplib.h"

#include "afford/error.hpp"
#include "afford/thumbnail.hpp"
#include "io_util.hpp"

namespace afford::service {

using detail::Json;
using detail::OrderedJson;
using pipeline::SessionState;
using pipeline::Stage;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownObjectId:
      return 404;
    case ErrorCode::kStageNotReached:
    case ErrorCode::kSessionMismatch:
      return 409;
    case ErrorCode::kIoError:
    case ErrorCode::kNumericalDivergence:
    case ErrorCode::kBindError:
      return 500;
    default:
      return 400;
  }
}

Response error_response(int status, std::string_view code, std::string_view message,
                        std::string_view stage) {
  OrderedJson body{{"error", {{"code", code}, {"message", message}, {"stage", stage}}}};
  return {status, "application/json", body.dump() + "\n"};
}

Response error_response(const Error& e) {
  return error_response(status_for(e.code()), to_string(e.code()), e.detail(), e.stage());
}

Response json_response(const OrderedJson& body, int status = 200) {
  return {status, "application/json", body.dump() + "\n"};
}

}  // namespace

struct SessionService::Impl {
  explicit Impl(pipeline::PipelineConfig config) : pipeline(std::move(config)) {}

  pipeline::Pipeline pipeline;

  mutable std::shared_mutex state_mutex;
  SessionState state;

  std::mutex projection_mutex;
  std::condition_variable projection_done;
  std::thread projection_thread;
  bool projection_running = false;
  std::optional<Error> projection_error;

  httplib::Server server;
  std::thread server_thread;

  const std::filesystem::path& output_dir() const { return pipeline.config().output_dir; }

  void run_projection(DetectionSet detections) {
    std::optional<Error> failure;
    try {
      auto layout = pipeline.compute_layout(detections);
      std::unique_lock lock(state_mutex);
      pipeline.attach_layout(state, std::move(layout));
      pipeline.write_artifacts(state, output_dir());
    } catch (const Error& e) {
      failure = e.stage().empty() ? e.with_stage("projected") : e;
    } catch (const std::exception& e) {
      failure = Error(ErrorCode::kIoError, e.what()).with_stage("projected");
    }
    std::lock_guard lock(projection_mutex);
    projection_error = std::move(failure);
    projection_running = false;
    projection_done.notify_all();
  }
};

SessionService::SessionService(pipeline::PipelineConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
  const auto& dir = impl_->output_dir();
  std::error_code ec;
  if (std::filesystem::is_regular_file(dir / "session.json", ec)) {
    impl_->state = pipeline::load_session(dir);
    if (impl_->state.session_id != impl_->pipeline.config().session_id) {
      throw Error(ErrorCode::kSessionMismatch,
                  "output directory holds session '" + impl_->state.session_id + "'");
    }
  } else {
    impl_->state = impl_->pipeline.ingest();
    impl_->pipeline.write_artifacts(impl_->state, dir);
  }
}

SessionService::~SessionService() {
  stop();
  std::unique_lock lock(impl_->projection_mutex);
  if (impl_->projection_thread.joinable()) {
    lock.unlock();
    impl_->projection_thread.join();
  }
}

void SessionService::start_projection() {
  DetectionSet detections;
  {
    std::shared_lock lock(impl_->state_mutex);
    if (impl_->state.stage >= Stage::kProjected) return;
    detections = impl_->state.detections;
  }
  std::lock_guard lock(impl_->projection_mutex);
  if (impl_->projection_running || impl_->projection_thread.joinable()) return;
  impl_->projection_running = true;
  impl_->projection_thread =
      std::thread([this, d = std::move(detections)]() mutable { impl_->run_projection(std::move(d)); });
}

void SessionService::wait_for_projection() {
  std::unique_lock lock(impl_->projection_mutex);
  impl_->projection_done.wait(lock, [&] { return !impl_->projection_running; });
}

Response SessionService::get_session() const {
  std::shared_lock lock(impl_->state_mutex);
  const auto& s = impl_->state;
  std::string projection = s.layout ? "ready" : "pending";
  {
    std::lock_guard plock(impl_->projection_mutex);
    if (impl_->projection_error) projection = "failed";
  }
  OrderedJson labels = OrderedJson::array();
  for (const auto& l : s.detections.label_set.labels()) labels.push_back(l);
  OrderedJson body{{"session_id", s.session_id},
                   {"stage", std::string(pipeline::to_string(s.stage))},
                   {"num_objects", s.detections.objects.size()},
                   {"dimension", s.detections.dimension},
                   {"label_set", std::move(labels)},
                   {"num_assignments", s.assignments.size()},
                   {"projection", projection}};
  return json_response(body);
}

Response SessionService::get_projection() const {
  {
    std::lock_guard plock(impl_->projection_mutex);
    if (impl_->projection_error) return error_response(*impl_->projection_error);
  }
  std::shared_lock lock(impl_->state_mutex);
  if (!impl_->state.layout) return json_response({{"status", "pending"}}, 202);
  return {200, "application/json", projection::layout_to_json(*impl_->state.layout)};
}

Response SessionService::get_thumbnail(const std::string& object_id) const {
  std::shared_lock lock(impl_->state_mutex);
  const DetectedObject* object = impl_->state.detections.find(object_id);
  if (object == nullptr) {
    return error_response(Error(ErrorCode::kUnknownObjectId, "no object '" + object_id + "'"));
  }
  const auto& images = impl_->pipeline.config().images_dir;
  if (!images.empty()) {
    if (auto png = thumbnail::crop_png(images / (object->frame_id + ".png"), object->box)) {
      return {200, "image/png", std::move(*png)};
    }
  }
  return error_response(404, "NotFound", "no image for frame '" + object->frame_id + "'", "");
}

Response SessionService::post_labels(const std::string& body) {
  try {
    const auto labels = relabel::parse_labels(body);
    wait_for_projection();
    {
      std::lock_guard plock(impl_->projection_mutex);
      if (impl_->projection_error) return error_response(*impl_->projection_error);
    }
    std::unique_lock lock(impl_->state_mutex);
    SessionState next = impl_->state;
    impl_->pipeline.submit_labels(next, labels);
    impl_->pipeline.write_artifacts(next, impl_->output_dir());
    impl_->state = std::move(next);
    OrderedJson ok{{"session_id", impl_->state.session_id},
                   {"stage", std::string(pipeline::to_string(impl_->state.stage))},
                   {"num_assignments", impl_->state.assignments.size()},
                   {"map", impl_->state.report->map_score}};
    return json_response(ok);
  } catch (const Error& e) {
    return error_response(e);
  }
}

Response SessionService::get_relabel() const {
  std::shared_lock lock(impl_->state_mutex);
  const auto& s = impl_->state;
  if (!s.relabeled || !s.verdicts) {
    return error_response(Error(ErrorCode::kStageNotReached, "no relabeled output yet")
                              .with_stage(std::string(pipeline::to_string(s.stage))));
  }
  std::map<std::string, const spatial::SpatialVerdict*> by_opener;
  for (const auto& v : *s.verdicts) by_opener[v.opener_id] = &v;
  OrderedJson records = OrderedJson::array();
  for (const auto& r : *s.relabeled) {
    OrderedJson rec{{"object_id", r.object_id},
                    {"frame_id", r.frame_id},
                    {"box", detail::box_to_json(r.box)},
                    {"original_label", r.original_label},
                    {"label", r.new_label},
                    {"confidence", r.new_confidence},
                    {"raw_similarity", r.raw_similarity}};
    if (auto it = by_opener.find(r.object_id); it != by_opener.end()) {
      rec["combined_score"] = it->second->combined_score;
      rec["kept"] = it->second->kept;
    }
    records.push_back(std::move(rec));
  }
  return json_response({{"session_id", s.session_id}, {"objects", std::move(records)}});
}

Response SessionService::get_report() const {
  std::shared_lock lock(impl_->state_mutex);
  const auto& s = impl_->state;
  if (!s.report) {
    return error_response(Error(ErrorCode::kStageNotReached, "no report yet")
                              .with_stage(std::string(pipeline::to_string(s.stage))));
  }
  auto parse = [](const std::optional<eval::EvalReport>& r) {
    return r ? OrderedJson::parse(eval::report_to_json(*r)) : OrderedJson();
  };
  return json_response({{"session_id", s.session_id},
                        {"verified", parse(s.report)},
                        {"relabeled", parse(s.relabel_report)},
                        {"baseline", parse(s.baseline_report)}});
}

SessionState SessionService::snapshot() const {
  std::shared_lock lock(impl_->state_mutex);
  return impl_->state;
}

namespace {

int bind_routes(SessionService& service, httplib::Server& server, const std::string& host,
                int port) {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy
  // port without error.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get("/session", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.get_session());
  });
  server.Get("/session/projection",
             [&service, send](const httplib::Request&, httplib::Response& res) {
               send(res, service.get_projection());
             });
  server.Get(R"(/session/objects/([^/]+)/thumbnail)",
             [&service, send](const httplib::Request& req, httplib::Response& res) {
               send(res, service.get_thumbnail(req.matches[1]));
             });
  server.Post("/session/labels", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.post_labels(req.body));
  });
  server.Get("/session/relabel", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.get_relabel());
  });
  server.Get("/session/report", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.get_report());
  });

  const int bound =
      port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kBindError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

}  // namespace

int SessionService::start(const std::string& host, int port) {
  auto& server = impl_->server;
  const int bound = bind_routes(*this, server, host, port);
  impl_->server_thread = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  return bound;
}

void SessionService::listen(const std::string& host, int port) {
  bind_routes(*this, impl_->server, host, port);
  impl_->server.listen_after_bind();
}

void SessionService::stop() {
  impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

void serve(const pipeline::PipelineConfig& config) {
  SessionService service(config);
  service.start_projection();
  service.listen(config.service.bind_address, config.service.port);
}

}  // namespace afford::service
