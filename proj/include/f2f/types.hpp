// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "f2f/image.hpp"

namespace f2f {

using Timestamp = std::chrono::system_clock::time_point;

std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view iso);

/// Time-evolving scenario text handed to the video generator.
struct TemporalCaption {
  std::string text;
  std::string generator_id;
  std::string prompt_digest;
  Timestamp created_at{};

  // Throws InvalidArgument unless text is non-empty with at most one sentence terminator.
  void validate() const;
  friend bool operator==(const TemporalCaption&, const TemporalCaption&) = default;
};

/// Indices into the clip a benchmark task was extracted from (1-based).
struct FrameAnnotation {
  int source_index = 1;
  int peak_index = 1;
  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

/// One editing problem.
struct EditTask {
  std::string id;
  Image source_image;
  std::string target_caption;
  std::optional<Image> gt_target_image;
  std::optional<TemporalCaption> temporal_caption;
  std::optional<std::string> category;

  // Provenance kept so a loaded manifest can be written back unchanged.
  std::filesystem::path source_path;
  std::optional<std::filesystem::path> gt_target_path;
  std::optional<std::string> source_description;
  std::optional<FrameAnnotation> annotation;

  bool has_gt() const { return gt_target_image.has_value(); }

  // Throws InvalidArgument on a violated invariant. A gt aspect-ratio mismatch
  // is an error only when `strict_aspect` is set; otherwise it is reported
  // through the returned warning text.
  std::optional<std::string> validate(bool strict_aspect = true) const;
};

struct GenerationParams {
  double guidance_scale = 6.0;
  int num_frames = 49;
  int num_inference_steps = 50;
  int fps = 8;

  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

/// Ordered frames f_1..f_T. Frame indices are 1-based everywhere.
struct VideoSequence {
  std::vector<Image> frames;
  int fps = 8;
  std::int64_t seed = 0;
  GenerationParams params;
  std::string backend_id;

  int frame_count() const { return static_cast<int>(frames.size()); }
  const Image& frame(int index) const;  // 1-based
  void validate() const;
};

enum class SelectionMethod { automatic, last, manual };

std::string_view to_string(SelectionMethod m);
SelectionMethod parse_selection_method(std::string_view s);

struct FrameSelection {
  int frame_index = 0;  // t* in [1..T]; 0 keeps the source
  SelectionMethod method = SelectionMethod::automatic;
  std::optional<int> identifier;
  std::optional<std::filesystem::path> collage_ref;
  std::optional<std::string> collage_digest;
  std::optional<std::string> vlm_reply;
  bool fallback = false;  // automatic selection fell back to the last frame
  std::optional<std::string> warning;

  void validate(int frame_count) const;
  friend bool operator==(const FrameSelection&, const FrameSelection&) = default;
};

/// Per (task, seed) metric bundle. Target-side LPIPS/CLIP-I exist iff the
/// task carries a ground-truth target.
struct EvalRecord {
  std::string task_id;
  std::int64_t seed = 0;
  double src_lpips = 0.0;
  double src_clip_i = 0.0;
  double tgt_clip = 0.0;
  std::optional<double> tgt_lpips;
  std::optional<double> tgt_clip_i;
  std::optional<std::string> error;  // provider failure annotation
  std::string arm;                   // ablation arm label, e.g. "temporal/auto"

  bool ok() const { return !error.has_value(); }
  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

}  // namespace f2f
