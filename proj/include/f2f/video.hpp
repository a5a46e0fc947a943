// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "f2f/image.hpp"
#include "f2f/types.hpp"

namespace f2f {

/// Generator-facing geometry: square inner region padded left/right with black.
struct CanvasGeometry {
  int inner_size = 480;
  int canvas_width = 720;
  int canvas_height = 480;
  int output_size = 512;

  int pad_left() const { return (canvas_width - inner_size) / 2; }
  int pad_right() const { return canvas_width - inner_size - pad_left(); }
  Rect inner_rect() const { return {pad_left(), (canvas_height - inner_size) / 2, inner_size, inner_size}; }
};

struct Canvas {
  Image image;
  int pad_left = 120;
  int pad_right = 120;
  int inner_size = 480;
  std::optional<std::string> warning;  // set when the source had to be cropped to square

  Rect inner_rect() const { return {pad_left, (image.height() - inner_size) / 2, inner_size, inner_size}; }
};

// Inputs smaller than 8 px on a side throw InvalidArgument.
inline constexpr int kMinSourceSide = 8;

// Non-square sources are center-cropped to square first (with a warning).
Canvas preprocess(const Image& source, const CanvasGeometry& geometry = {});

// Pads an already inner-sized square image; exact inverse of crop_inner.
Image pad_to_canvas(const Image& inner, const CanvasGeometry& geometry = {});
Image crop_inner(const Image& frame, const CanvasGeometry& geometry = {});

// Central inner crop, bilinear-resized to output_size; frame must be canvas-sized.
Image postprocess(const Image& frame, const CanvasGeometry& geometry = {});

// ---------------------------------------------------------------------------
// Mock backend script

struct BrightnessRamp {
  double from = 0.0;
  double to = 0.0;
};
struct ContrastRamp {
  double from = 1.0;
  double to = 1.0;
};
/// Interpolates from the identity to `to` = [a b tx; c d ty] about the image centre.
struct AffineRamp {
  std::array<double, 6> to{1, 0, 0, 0, 1, 0};
  static AffineRamp translate(double dx, double dy) { return {{1, 0, dx, 0, 1, dy}}; }
};
/// Blends `region` toward `color` with an alpha ramp.
struct RecolorRamp {
  Rect region;
  Rgb color{255, 0, 0};
  double from = 0.0;
  double to = 1.0;
};

using TransformOp = std::variant<BrightnessRamp, ContrastRamp, AffineRamp, RecolorRamp>;

/// Per-frame parametric edits, each linear (hence monotone) in progress
/// p = (t-1)/(T-1).
struct TransformScript {
  std::vector<TransformOp> ops;

  void validate(const Image& canvas) const;
  Image apply(const Image& canvas, double progress) const;

  // Deterministic script derived from (caption, seed); used by the mock backend.
  static TransformScript derive(std::string_view caption, std::int64_t seed, const Canvas& canvas);
};

// Frame 1 is the canvas itself; frame t applies the script at (t-1)/(T-1).
VideoSequence synth_video(const Canvas& canvas, const TransformScript& script, const GenerationParams& params);

// ---------------------------------------------------------------------------
// Backends

struct BackendCapabilities {
  int max_frames = 49;
  int native_width = 720;
  int native_height = 480;
  bool supports_seed = true;
};

/// Image-to-video generator: frames starting from the canvas, guided by the caption.
class VideoBackend {
 public:
  virtual ~VideoBackend() = default;
  virtual std::string id() const = 0;
  virtual BackendCapabilities capabilities() const = 0;
  virtual std::vector<Image> generate(const Canvas& canvas, const TemporalCaption& caption, std::int64_t seed,
                                      const GenerationParams& params) = 0;
};

/// In-process deterministic backend built on synth_video.
class MockBackend : public VideoBackend {
 public:
  explicit MockBackend(std::string id = "mock", std::optional<TransformScript> fixed_script = std::nullopt,
                       BackendCapabilities caps = {120, 720, 480, true});

  std::string id() const override { return id_; }
  BackendCapabilities capabilities() const override { return caps_; }
  std::vector<Image> generate(const Canvas& canvas, const TemporalCaption& caption, std::int64_t seed,
                              const GenerationParams& params) override;

  int invocations() const { return invocations_.load(); }

 private:
  std::string id_;
  std::optional<TransformScript> fixed_script_;
  BackendCapabilities caps_;
  std::atomic<int> invocations_{0};
};

struct RemoteBackendConfig {
  std::string id = "remote";
  std::string endpoint;
  std::string model;
  std::chrono::milliseconds poll_interval{2000};
  std::chrono::milliseconds max_wait{std::chrono::minutes(15)};
  std::chrono::milliseconds request_timeout{60000};
  std::string api_key_env = "F2F_BACKEND_API_KEY";
  BackendCapabilities capabilities;
  double first_frame_min_psnr = 20.0;
};

/// Generic submit -> poll -> download adapter (wire format in docs/backends.md).
class RemoteBackend : public VideoBackend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);

  std::string id() const override { return config_.id; }
  BackendCapabilities capabilities() const override { return config_.capabilities; }
  std::vector<Image> generate(const Canvas& canvas, const TemporalCaption& caption, std::int64_t seed,
                              const GenerationParams& params) override;

 private:
  RemoteBackendConfig config_;
};

// ---------------------------------------------------------------------------

struct GenerateResult {
  VideoSequence video;
  std::string cache_key;
  bool cache_hit = false;
  std::filesystem::path cache_dir;
};

/// Runs backends through the content-addressed frame cache at
/// `<cache_root>/<backend_id>/<key>/`. Concurrent requests for the same key
/// share one backend call.
class VideoEngine {
 public:
  explicit VideoEngine(std::filesystem::path cache_root);

  GenerateResult generate(VideoBackend& backend, const Canvas& canvas, const TemporalCaption& caption,
                          std::int64_t seed, const GenerationParams& params = {});

  // Cached frames for a key, if present.
  std::optional<VideoSequence> lookup(const std::string& backend_id, const std::string& key) const;
  std::filesystem::path cache_dir(const std::string& backend_id, const std::string& key) const;

 private:
  GenerateResult produce(VideoBackend& backend, const Canvas& canvas, const TemporalCaption& caption,
                         std::int64_t seed, const GenerationParams& params, const std::string& key);

  std::filesystem::path root_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<GenerateResult>> inflight_;
};

}  // namespace f2f
