// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <thread>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"
#include "f2f/http_client.hpp"
#include "f2f/image_io.hpp"
#include "f2f/records.hpp"
#include "f2f/video.hpp"

namespace f2f {

namespace fs = std::filesystem;

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw InvalidArgument("backend " + config_.id + " has no endpoint");
  http::parse_url(config_.endpoint);
}

namespace {

void check_status(const http::Response& res, const std::string& what) {
  if (res.status >= 200 && res.status < 300) return;
  const auto msg = what + " returned HTTP " + std::to_string(res.status);
  if (http::is_retryable_status(res.status)) throw RetryableError(msg, res.status);
  throw FatalError(msg, res.status);
}

Json parse_json(const http::Response& res, const std::string& what) {
  try {
    return Json::parse(res.body);
  } catch (const Json::exception&) {
    throw IntegrityError(what + " returned a non-JSON body");
  }
}

std::vector<Image> decode_container(const std::string& bytes, const std::string& url) {
  std::string ext = ".mp4";
  const auto q = url.find('?');
  const auto path = url.substr(0, q);
  if (const auto dot = path.rfind('.'); dot != std::string::npos && path.size() - dot <= 5) ext = path.substr(dot);
  const auto tmp = staging_path(fs::temp_directory_path() / ("f2f-download" + ext));
  const auto file = tmp.parent_path() / (tmp.filename().string() + ext);
  write_file_atomic(file, bytes);
  try {
    auto frames = extract_frames(file, 0);
    std::error_code ec;
    fs::remove(file, ec);
    return frames;
  } catch (...) {
    std::error_code ec;
    fs::remove(file, ec);
    throw;
  }
}

}  // namespace

std::vector<Image> RemoteBackend::generate(const Canvas& canvas, const TemporalCaption& caption, std::int64_t seed,
                                           const GenerationParams& params) {
  http::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  const Json submit{{"model", config_.model},
                    {"prompt", caption.text},
                    {"image", base64_encode(encode_png(canvas.image))},
                    {"seed", seed},
                    {"num_frames", params.num_frames},
                    {"guidance_scale", params.guidance_scale},
                    {"num_inference_steps", params.num_inference_steps},
                    {"fps", params.fps}};
  const auto base = http::join(config_.endpoint, "generations");
  const auto created = http::post(base, submit.dump(), "application/json", headers, config_.request_timeout);
  check_status(created, "backend " + config_.id + " submit");
  const auto job_id = parse_json(created, "submit").value("id", std::string());
  if (job_id.empty()) throw IntegrityError("backend " + config_.id + " submit response lacks an id");

  const auto deadline = std::chrono::steady_clock::now() + config_.max_wait;
  Json status;
  while (true) {
    const auto res = http::get(http::join(base, job_id), headers, config_.request_timeout);
    check_status(res, "backend " + config_.id + " poll");
    status = parse_json(res, "poll");
    const auto state = status.value("status", std::string());
    if (state == "succeeded") break;
    if (state == "failed")
      throw FatalError("backend " + config_.id + " job " + job_id + " failed: " + status.value("error", "unknown"));
    if (std::chrono::steady_clock::now() >= deadline)
      throw RetryableError("backend " + config_.id + " job " + job_id + " did not finish within max_wait");
    std::this_thread::sleep_for(config_.poll_interval);
  }

  const auto& output = status.contains("output") ? status["output"] : status;
  std::vector<Image> frames;
  if (output.contains("frames")) {
    for (const auto& f : output["frames"]) frames.push_back(decode_image(base64_decode(f.get<std::string>())));
  } else if (output.contains("video_url")) {
    const auto url = output["video_url"].get<std::string>();
    const auto res = http::get(url, headers, config_.request_timeout);
    check_status(res, "backend " + config_.id + " download");
    frames = decode_container(res.body, url);
  } else {
    throw IntegrityError("backend " + config_.id + " result has neither frames nor video_url");
  }
  if (static_cast<int>(frames.size()) != params.num_frames)
    throw IntegrityError("backend " + config_.id + " delivered " + std::to_string(frames.size()) +
                         " frames, expected " + std::to_string(params.num_frames));

  for (auto& f : frames)
    if (f.width() != canvas.image.width() || f.height() != canvas.image.height())
      f = resize_bilinear(f, canvas.image.width(), canvas.image.height());
  const double first = psnr(frames.front(), canvas.image);
  if (first < config_.first_frame_min_psnr)
    throw IntegrityError("backend " + config_.id + " first frame deviates from the canvas (PSNR " +
                         std::to_string(first) + " dB)");
  return frames;
}

}  // namespace f2f
