// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "f2f/config.hpp"
#include "f2f/job_store.hpp"
#include "f2f/pipeline.hpp"
#include "f2f/video.hpp"
#include "f2f/vlm.hpp"

namespace f2f {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  int queue_size = 8;
  int workers = 1;
  std::string cors_origin = "*";
};

ServiceOptions service_options(const Config& c);

/// HTTP front end over EditPipeline. Jobs run on an in-process worker pool;
/// every state change is persisted in the job store before it is visible.
///
///   POST /v1/edits                       multipart image + prompt [+ options] -> 202 {job_id}
///   GET  /v1/edits/{id}                  job document
///   GET  /v1/edits/{id}/frames/{k}       PNG (404 until generated, 416 outside 1..T)
///   GET  /v1/edits/{id}/collage|result   PNG
///   POST /v1/edits/{id}/selection        {"frame_index": k}
///   GET  /v1/backends, GET /v1/health
class EditService {
 public:
  EditService(JobStore& store, VideoEngine& engine, std::shared_ptr<VlmGateway> gateway, BackendMap backends,
              std::string default_backend, PipelineConfig pipeline, ServiceOptions options = {});
  ~EditService();
  EditService(const EditService&) = delete;
  EditService& operator=(const EditService&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace f2f
