// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/metrics.hpp"

#include <cmath>
#include <random>

#include "f2f/error.hpp"
#include "f2f/hash.hpp"
#include "f2f/http_client.hpp"
#include "f2f/image_io.hpp"
#include "f2f/records.hpp"
#include "f2f/text.hpp"

namespace f2f {

std::vector<double> l2_normalize(std::vector<double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 == 0.0) throw InvalidArgument("cannot normalise a zero vector");
  const double n = std::sqrt(n2);
  for (double& x : v) x /= n;
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("cosine of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---------------------------------------------------------------------------

double StubProviders::perceptual(const Image& a, const Image& b) {
  const auto ra = resize_bilinear(a, kPerceptualSize, kPerceptualSize);
  const auto rb = resize_bilinear(b, kPerceptualSize, kPerceptualSize);
  return mean_abs_diff(ra, rb) / 255.0;
}

std::vector<double> StubProviders::image_embed(const Image& img) {
  if (img.empty()) throw InvalidArgument("cannot embed an empty image");
  std::vector<double> v(kGrid * kGrid, 0.0);
  const std::int64_t w = img.width(), h = img.height();
  for (int gy = 0; gy < kGrid; ++gy) {
    const std::int64_t y0 = gy * h / kGrid, y1 = std::max(y0 + 1, (gy + 1) * h / kGrid);
    for (int gx = 0; gx < kGrid; ++gx) {
      const std::int64_t x0 = gx * w / kGrid, x1 = std::max(x0 + 1, (gx + 1) * w / kGrid);
      double sum = 0.0;
      for (auto y = y0; y < std::min(y1, h); ++y)
        for (auto x = x0; x < std::min(x1, w); ++x) {
          const auto* p = img.pixel(static_cast<int>(x), static_cast<int>(y));
          sum += 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
      const auto count = static_cast<double>((std::min(y1, h) - y0) * (std::min(x1, w) - x0));
      v[static_cast<std::size_t>(gy * kGrid + gx)] = sum / count;
    }
  }
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 == 0.0) return std::vector<double>(v.size(), 1.0 / kGrid);
  return l2_normalize(std::move(v));
}

std::vector<double> StubProviders::text_embed(std::string_view text) {
  const auto key = normalize_whitespace(text);
  {
    std::lock_guard lock(mu_);
    if (auto it = text_overrides_.find(key); it != text_overrides_.end()) return it->second;
  }
  const auto d = Sha256().update("f2f.stub.text.v1\n").update(key).finish();
  std::uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | d[static_cast<std::size_t>(i)];
  std::mt19937_64 rng(seed);
  std::vector<double> v(kGrid * kGrid);
  for (auto& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return l2_normalize(std::move(v));
}

void StubProviders::set_text_embedding(std::string_view text, std::vector<double> embedding) {
  std::lock_guard lock(mu_);
  text_overrides_[normalize_whitespace(text)] = l2_normalize(std::move(embedding));
}

// ---------------------------------------------------------------------------

RemoteProviders::RemoteProviders(RemoteProvidersConfig config) : config_(std::move(config)) {
  http::parse_url(config_.endpoint);
}

namespace {

Json call(const RemoteProvidersConfig& cfg, const std::string& path, const Json& body) {
  const auto res = http::post(http::join(cfg.endpoint, path), body.dump(), "application/json", {}, cfg.timeout);
  if (res.status != 200) {
    const auto msg = "metric provider " + path + " returned HTTP " + std::to_string(res.status);
    if (http::is_retryable_status(res.status)) throw RetryableError(msg, res.status);
    throw FatalError(msg, res.status);
  }
  try {
    return Json::parse(res.body);
  } catch (const Json::exception&) {
    throw IntegrityError("metric provider " + path + " returned a non-JSON body");
  }
}

std::vector<double> embedding_from(const Json& j) {
  return l2_normalize(j.at("embedding").get<std::vector<double>>());
}

}  // namespace

double RemoteProviders::perceptual(const Image& a, const Image& b) {
  const auto j = call(config_, "perceptual",
                      {{"a", base64_encode(encode_png(a))}, {"b", base64_encode(encode_png(b))}});
  const double d = j.at("distance").get<double>();
  if (!(d >= 0.0)) throw IntegrityError("metric provider returned a negative perceptual distance");
  return d;
}

std::vector<double> RemoteProviders::image_embed(const Image& img) {
  return embedding_from(call(config_, "embed/image", {{"image", base64_encode(encode_png(img))}}));
}

std::vector<double> RemoteProviders::text_embed(std::string_view text) {
  return embedding_from(call(config_, "embed/text", {{"text", normalize_whitespace(text)}}));
}

// ---------------------------------------------------------------------------

double image_similarity(const Image& a, const Image& b, MetricProviders& providers) {
  const auto ea = providers.image_embed(a);
  const auto eb = providers.image_embed(b);
  return cosine(ea, eb);
}

double text_image_score(const Image& img, std::string_view caption, MetricProviders& providers) {
  const auto ei = providers.image_embed(img);
  const auto et = providers.text_embed(normalize_whitespace(caption));
  return cosine(ei, et);
}

Image to_eval_resolution(const Image& img, int size) {
  if (img.width() == size && img.height() == size) return img;
  const Image square = img.width() == img.height() ? img : crop(img, center_square(img));
  return resize_bilinear(square, size, size);
}

EvalRecord evaluate_task(const EditTask& task, const Image& edited, MetricProviders& providers, int resolution) {
  if (edited.width() != resolution || edited.height() != resolution)
    throw InvalidArgument("edited image must be " + std::to_string(resolution) + "x" + std::to_string(resolution));
  EvalRecord r;
  r.task_id = task.id;
  try {
    const auto source = to_eval_resolution(task.source_image, resolution);
    r.src_lpips = providers.perceptual(source, edited);
    r.src_clip_i = image_similarity(source, edited, providers);
    r.tgt_clip = text_image_score(edited, task.target_caption, providers);
    if (task.gt_target_image) {
      const auto gt = to_eval_resolution(*task.gt_target_image, resolution);
      r.tgt_lpips = providers.perceptual(gt, edited);
      r.tgt_clip_i = image_similarity(gt, edited, providers);
    }
  } catch (const std::exception& e) {
    r.error = std::string("metric provider ") + providers.id() + " failed: " + e.what();
  }
  return r;
}

}  // namespace f2f
