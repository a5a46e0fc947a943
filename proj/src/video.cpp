// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/video.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"
#include "f2f/job_store.hpp"
#include "f2f/records.hpp"

namespace f2f {

namespace fs = std::filesystem;

Canvas preprocess(const Image& source, const CanvasGeometry& g) {
  if (source.width() < kMinSourceSide || source.height() < kMinSourceSide)
    throw InvalidArgument("source image " + std::to_string(source.width()) + "x" + std::to_string(source.height()) +
                          " is smaller than " + std::to_string(kMinSourceSide) + " px");
  Canvas canvas;
  Image square = source;
  if (source.width() != source.height()) {
    const auto box = center_square(source);
    square = crop(source, box);
    canvas.warning = "non-square source " + std::to_string(source.width()) + "x" + std::to_string(source.height()) +
                     " center-cropped to " + std::to_string(box.width) + "x" + std::to_string(box.height);
  }
  canvas.image = pad_to_canvas(resize_bilinear(square, g.inner_size, g.inner_size), g);
  canvas.pad_left = g.pad_left();
  canvas.pad_right = g.pad_right();
  canvas.inner_size = g.inner_size;
  return canvas;
}

Image pad_to_canvas(const Image& inner, const CanvasGeometry& g) {
  if (inner.width() != g.inner_size || inner.height() != g.inner_size)
    throw InvalidArgument("inner image must be " + std::to_string(g.inner_size) + " px square");
  Image out(g.canvas_width, g.canvas_height, Rgb{0, 0, 0});
  const auto r = g.inner_rect();
  blit(out, inner, r.x, r.y);
  return out;
}

Image crop_inner(const Image& frame, const CanvasGeometry& g) {
  if (frame.width() != g.canvas_width || frame.height() != g.canvas_height)
    throw InvalidArgument("frame is " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                          ", expected " + std::to_string(g.canvas_width) + "x" + std::to_string(g.canvas_height));
  return crop(frame, g.inner_rect());
}

Image postprocess(const Image& frame, const CanvasGeometry& g) {
  return resize_bilinear(crop_inner(frame, g), g.output_size, g.output_size);
}

// ---------------------------------------------------------------------------

namespace {

std::uint8_t clamp_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

double lerp(double a, double b, double p) { return a + (b - a) * p; }

void apply_op(Image& img, const BrightnessRamp& op, double p) {
  const double off = lerp(op.from, op.to, p);
  for (auto& v : img.data()) v = clamp_u8(v + off);
}

void apply_op(Image& img, const ContrastRamp& op, double p) {
  const double k = lerp(op.from, op.to, p);
  for (auto& v : img.data()) v = clamp_u8((v - 128.0) * k + 128.0);
}

void apply_op(Image& img, const AffineRamp& op, double p) {
  const double a = lerp(1, op.to[0], p), b = lerp(0, op.to[1], p), tx = lerp(0, op.to[2], p);
  const double c = lerp(0, op.to[3], p), d = lerp(1, op.to[4], p), ty = lerp(0, op.to[5], p);
  const double det = a * d - b * c;
  if (std::abs(det) < 1e-12) throw InvalidArgument("affine ramp passes through a singular matrix");
  // Inverse of the forward map about the image centre.
  const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
  const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;
  const Image src = img;
  const int w = src.width(), h = src.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double ux = x - cx - tx, uy = y - cy - ty;
      const double sx = ia * ux + ib * uy + cx;
      const double sy = ic * ux + id * uy + cy;
      const double fx = std::floor(sx), fy = std::floor(sy);
      const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
      const double wx = sx - fx, wy = sy - fy;
      double acc[3] = {0, 0, 0};
      for (int k = 0; k < 4; ++k) {
        const int xx = x0 + (k & 1), yy = y0 + (k >> 1);
        const double wgt = ((k & 1) ? wx : 1 - wx) * ((k >> 1) ? wy : 1 - wy);
        if (wgt == 0.0 || xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
        const auto* s = src.pixel(xx, yy);
        acc[0] += wgt * s[0];
        acc[1] += wgt * s[1];
        acc[2] += wgt * s[2];
      }
      auto* o = img.pixel(x, y);
      o[0] = clamp_u8(acc[0]);
      o[1] = clamp_u8(acc[1]);
      o[2] = clamp_u8(acc[2]);
    }
  }
}

void apply_op(Image& img, const RecolorRamp& op, double p) {
  const double alpha = std::clamp(lerp(op.from, op.to, p), 0.0, 1.0);
  for (int y = op.region.y; y < op.region.bottom(); ++y)
    for (int x = op.region.x; x < op.region.right(); ++x) {
      auto* px = img.pixel(x, y);
      for (int c = 0; c < 3; ++c) px[c] = clamp_u8(px[c] + (op.color[c] - px[c]) * alpha);
    }
}

}  // namespace

void TransformScript::validate(const Image& canvas) const {
  for (const auto& op : ops) {
    if (const auto* a = std::get_if<AffineRamp>(&op)) {
      const auto& m = a->to;
      for (double v : m)
        if (!std::isfinite(v)) throw InvalidArgument("affine target has a non-finite entry");
      // det(p) = q2 p^2 + q1 p + 1 along the ramp; it must stay away from zero.
      const double q2 = (m[0] - 1) * (m[4] - 1) - m[1] * m[3];
      const double q1 = (m[0] - 1) + (m[4] - 1);
      const auto det = [&](double p) { return (q2 * p + q1) * p + 1; };
      bool sign_change = det(1.0) <= 0.0;
      if (q2 != 0.0) {
        const double v = -q1 / (2 * q2);
        if (v > 0.0 && v < 1.0) sign_change = sign_change || det(v) <= 0.0;
      }
      if (sign_change || std::abs(det(1.0)) < 1e-6)
        throw InvalidArgument("affine ramp passes through a singular matrix");
    }
    if (const auto* r = std::get_if<RecolorRamp>(&op)) {
      if (r->region.width <= 0 || r->region.height <= 0 || !canvas.bounds().contains(r->region))
        throw InvalidArgument("recolor region (" + std::to_string(r->region.x) + "," + std::to_string(r->region.y) +
                              "," + std::to_string(r->region.width) + "x" + std::to_string(r->region.height) +
                              ") is outside the " + std::to_string(canvas.width()) + "x" +
                              std::to_string(canvas.height()) + " canvas");
    }
  }
}

Image TransformScript::apply(const Image& canvas, double progress) const {
  Image out = canvas;
  if (progress == 0.0) return out;
  for (const auto& op : ops) std::visit([&](const auto& o) { apply_op(out, o, progress); }, op);
  return out;
}

TransformScript TransformScript::derive(std::string_view caption, std::int64_t seed, const Canvas& canvas) {
  const auto h = Sha256().update("f2f.mock.v1\n").update(caption).update("\n" + std::to_string(seed)).finish();
  const Rect inner = canvas.inner_rect();
  const int side = std::max(8, inner.width * (30 + h[0] % 30) / 100);
  const int x = inner.x + (inner.width - side) * (h[1] % 101) / 100;
  const int y = inner.y + (inner.height - side) * (h[2] % 101) / 100;

  TransformScript s;
  s.ops.push_back(RecolorRamp{{x, y, side, side}, {h[3], h[4], h[5]}, 0.0, 0.85});
  s.ops.push_back(BrightnessRamp{0.0, static_cast<double>(static_cast<int>(h[6] % 31) - 15)});
  s.ops.push_back(AffineRamp::translate(static_cast<double>(static_cast<int>(h[7] % 17) - 8), 0.0));
  return s;
}

VideoSequence synth_video(const Canvas& canvas, const TransformScript& script, const GenerationParams& params) {
  if (params.num_frames < 1) throw InvalidArgument("num_frames must be >= 1");
  script.validate(canvas.image);
  VideoSequence v;
  v.fps = params.fps;
  v.params = params;
  v.frames.reserve(static_cast<std::size_t>(params.num_frames));
  const int T = params.num_frames;
  v.frames.push_back(canvas.image);
  for (int t = 2; t <= T; ++t)
    v.frames.push_back(script.apply(canvas.image, static_cast<double>(t - 1) / static_cast<double>(T - 1)));
  return v;
}

// ---------------------------------------------------------------------------

MockBackend::MockBackend(std::string id, std::optional<TransformScript> fixed_script, BackendCapabilities caps)
    : id_(std::move(id)), fixed_script_(std::move(fixed_script)), caps_(caps) {}

std::vector<Image> MockBackend::generate(const Canvas& canvas, const TemporalCaption& caption, std::int64_t seed,
                                         const GenerationParams& params) {
  ++invocations_;
  const auto script = fixed_script_ ? *fixed_script_ : TransformScript::derive(caption.text, seed, canvas);
  return synth_video(canvas, script, params).frames;
}

// ---------------------------------------------------------------------------

VideoEngine::VideoEngine(fs::path cache_root) : root_(std::move(cache_root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create cache directory (" + ec.message() + ")", root_);
}

fs::path VideoEngine::cache_dir(const std::string& backend_id, const std::string& key) const {
  validate_job_id(backend_id);
  validate_job_id(key);
  return root_ / backend_id / key;
}

namespace {
std::string frame_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f_%03d.png", t);
  return buf;
}
}  // namespace

std::optional<VideoSequence> VideoEngine::lookup(const std::string& backend_id, const std::string& key) const {
  const auto dir = cache_dir(backend_id, key);
  const auto meta_path = dir / "meta.rec";
  if (!fs::is_regular_file(meta_path)) return std::nullopt;
  const auto meta = Json::parse(read_file(meta_path));
  VideoSequence v;
  v.backend_id = backend_id;
  v.seed = meta.at("seed").get<std::int64_t>();
  v.params = meta.at("params").get<GenerationParams>();
  v.fps = v.params.fps;
  const int n = meta.at("frame_count").get<int>();
  for (int t = 1; t <= n; ++t) v.frames.push_back(read_image(dir / frame_name(t)));
  return v;
}

GenerateResult VideoEngine::generate(VideoBackend& backend, const Canvas& canvas, const TemporalCaption& caption,
                                     std::int64_t seed, const GenerationParams& params) {
  const auto caps = backend.capabilities();
  if (params.num_frames < 1 || params.num_frames > caps.max_frames)
    throw InvalidArgument("num_frames " + std::to_string(params.num_frames) + " exceeds backend " + backend.id() +
                          " limit of " + std::to_string(caps.max_frames));
  const auto key = cache_key(pixel_digest(canvas.image), caption.text, params, seed);
  const auto flight_id = backend.id() + "/" + key;

  std::promise<GenerateResult> promise;
  std::shared_future<GenerateResult> shared;
  bool leader = false;
  {
    std::lock_guard lock(mu_);
    auto it = inflight_.find(flight_id);
    if (it != inflight_.end()) {
      shared = it->second;
    } else {
      shared = promise.get_future().share();
      inflight_.emplace(flight_id, shared);
      leader = true;
    }
  }
  if (!leader) {
    auto r = shared.get();
    r.cache_hit = true;
    return r;
  }

  try {
    auto result = produce(backend, canvas, caption, seed, params, key);
    promise.set_value(result);
  } catch (...) {
    promise.set_exception(std::current_exception());
  }
  {
    std::lock_guard lock(mu_);
    inflight_.erase(flight_id);
  }
  return shared.get();
}

GenerateResult VideoEngine::produce(VideoBackend& backend, const Canvas& canvas, const TemporalCaption& caption,
                                    std::int64_t seed, const GenerationParams& params, const std::string& key) {
  GenerateResult result;
  result.cache_key = key;
  result.cache_dir = cache_dir(backend.id(), key);
  if (auto cached = lookup(backend.id(), key)) {
    result.video = std::move(*cached);
    result.cache_hit = true;
    return result;
  }

  auto frames = backend.generate(canvas, caption, seed, params);
  if (static_cast<int>(frames.size()) != params.num_frames)
    throw IntegrityError("backend " + backend.id() + " delivered " + std::to_string(frames.size()) +
                         " frames, expected " + std::to_string(params.num_frames));
  VideoSequence v;
  v.frames = std::move(frames);
  v.fps = params.fps;
  v.seed = seed;
  v.params = params;
  v.backend_id = backend.id();
  v.validate();
  if (v.frames.front().width() != canvas.image.width() || v.frames.front().height() != canvas.image.height())
    throw IntegrityError("backend " + backend.id() + " delivered frames that are not canvas-sized");

  const auto staged = staging_path(result.cache_dir);
  fs::create_directories(staged);
  try {
    for (int t = 1; t <= v.frame_count(); ++t) write_png(v.frame(t), staged / frame_name(t));
    const Json meta{{"cache_key", key},       {"backend_id", backend.id()}, {"seed", seed},
                    {"params", params},       {"caption", caption.text},    {"frame_count", v.frame_count()},
                    {"source_digest", pixel_digest(canvas.image)}};
    write_file_atomic(staged / "meta.rec", meta.dump(2) + "\n");
    std::error_code ec;
    fs::create_directories(result.cache_dir.parent_path());
    fs::rename(staged, result.cache_dir, ec);
    if (ec) fs::remove_all(staged, ec);  // another process published the same key first
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staged, ec);
    throw;
  }
  result.video = std::move(v);
  result.cache_hit = false;
  return result;
}

}  // namespace f2f
