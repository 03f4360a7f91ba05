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

#ifndef AFFORD_SERVICE_HPP_
#define AFFORD_SERVICE_HPP_

// HTTP session service backing the labeling canvas.
//
//   GET  /session                          stage and summary
//   GET  /session/projection               layout, or {"status":"pending"}
//   GET  /session/objects/{id}/thumbnail   PNG crop, 404 without images
//   POST /session/labels                   {session_id, assignments:[...]}
//   GET  /session/relabel                  relabeled records and verdicts
//   GET  /session/report                   evaluation report
//
// Errors are {"error":{"code","message","stage"}} with a 4xx/5xx status.

#include <memory>
#include <string>

#include "afford/pipeline.hpp"

namespace afford::service {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// One session per output directory. Mutations are serialized; readers see a
// consistent snapshot. Projection runs in the background.
class SessionService {
 public:
  // Resumes the session in config.output_dir if one exists, otherwise
  // ingests and persists a new one.
  explicit SessionService(pipeline::PipelineConfig config);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  // Starts the projection if the session has not reached that stage yet.
  void start_projection();
  void wait_for_projection();

  Response get_session() const;
  Response get_projection() const;
  Response get_thumbnail(const std::string& object_id) const;
  Response post_labels(const std::string& body);
  Response get_relabel() const;
  Response get_report() const;

  pipeline::SessionState snapshot() const;

  // Binds (port 0 picks a free port), serves on a background thread and
  // returns the bound port. Throws kBindError.
  int start(const std::string& host, int port);
  // Blocks until stop() is called.
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocking.
void serve(const pipeline::PipelineConfig& config);

}  // namespace afford::service

#endif  // AFFORD_SERVICE_HPP_
