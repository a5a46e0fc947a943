// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "f2f/image.hpp"
#include "f2f/types.hpp"

namespace f2f {

/// Perceptual distance plus joint image/text embeddings. Implementations
/// must be safe to call from several threads.
class MetricProviders {
 public:
  virtual ~MetricProviders() = default;
  virtual std::string id() const = 0;
  // >= 0, zero for identical inputs, symmetric.
  virtual double perceptual(const Image& a, const Image& b) = 0;
  // Unit-norm embeddings.
  virtual std::vector<double> image_embed(const Image& img) = 0;
  virtual std::vector<double> text_embed(std::string_view text) = 0;
};

/// Deterministic providers that need no model weights:
///   perceptual  = mean absolute difference / 255 after bilinear resize to 64x64
///   image_embed = L2-normalised 8x8 grayscale area average (64-d)
///   text_embed  = L2-normalised 64-d vector drawn from SHA-256 of the text
/// An all-black image embeds to the uniform unit vector.
class StubProviders : public MetricProviders {
 public:
  static constexpr int kGrid = 8;
  static constexpr int kPerceptualSize = 64;

  std::string id() const override { return "stub"; }
  double perceptual(const Image& a, const Image& b) override;
  std::vector<double> image_embed(const Image& img) override;
  std::vector<double> text_embed(std::string_view text) override;

  // Pins the embedding of a (whitespace-normalised) text; normalised on insert.
  void set_text_embedding(std::string_view text, std::vector<double> embedding);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<double>> text_overrides_;
};

struct RemoteProvidersConfig {
  std::string endpoint = "http://127.0.0.1:8765";
  std::chrono::milliseconds timeout{120000};
};

/// Pretrained perceptual/embedding models served over HTTP
/// (tools/reference_metrics_server.py; wire format in docs/metrics.md).
class RemoteProviders : public MetricProviders {
 public:
  explicit RemoteProviders(RemoteProvidersConfig config);

  std::string id() const override { return "reference"; }
  double perceptual(const Image& a, const Image& b) override;
  std::vector<double> image_embed(const Image& img) override;
  std::vector<double> text_embed(std::string_view text) override;

 private:
  RemoteProvidersConfig config_;
};

std::vector<double> l2_normalize(std::vector<double> v);
// Cosine similarity; throws InvalidArgument on dimension mismatch or zero vectors.
double cosine(std::span<const double> a, std::span<const double> b);

// Cosine of the two image embeddings (CLIP-I role).
double image_similarity(const Image& a, const Image& b, MetricProviders& providers);
// Cosine of image and text embeddings (CLIP score role); caption whitespace is normalised.
double text_image_score(const Image& img, std::string_view caption, MetricProviders& providers);

// Square-crops and resizes to `size` x `size` (bilinear) for metric inputs.
Image to_eval_resolution(const Image& img, int size = 512);

// Source-side metrics always; target-side metrics iff the task has a gt
// image. Provider failures are recorded in `error` rather than thrown.
EvalRecord evaluate_task(const EditTask& task, const Image& edited, MetricProviders& providers, int resolution = 512);

}  // namespace f2f
