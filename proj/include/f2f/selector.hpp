// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "f2f/image.hpp"
#include "f2f/types.hpp"
#include "f2f/vlm.hpp"

namespace f2f {

inline constexpr int kDefaultStride = 4;
inline constexpr int kMaxCollageCells = 16;
inline constexpr int kCollageColumns = 4;

struct SampledFrame {
  int identifier = 0;   // 1-based label stamped on the collage cell
  int frame_index = 0;  // 1-based index into the video
  Image frame;
};

// Frame indices {m*stride | m >= 1} within (1, T]. Frame 1 is excluded
// because it duplicates the source.
std::vector<int> sampled_indices(int frame_count, int stride = kDefaultStride);

// Throws InvalidArgument when stride < 1 or the video has fewer than stride+1 frames.
std::vector<SampledFrame> sample_frames(const VideoSequence& video, int stride = kDefaultStride);

struct CollageCell {
  int identifier = 0;
  Rect region;
  int frame_index = 0;
};

struct CollageStyle {
  int gap = 8;
  Rgb background{24, 24, 24};
  int thumb_divisor = 3;  // cell size = frame size / divisor
};

/// Source thumbnail centred on top, sampled frames below in rows of four,
/// each cell stamped top-left with its identifier.
struct Collage {
  Image image;
  Rect source_slot;
  std::vector<CollageCell> cells;
  int rows = 0;
  int cols = 0;

  std::string digest() const { return pixel_digest(image); }
  // Throws InvalidArgument for an identifier that is not in the collage.
  const CollageCell& cell(int identifier) const;
};

// Integer-only compositing: output is bit-identical for identical inputs.
Collage build_collage(const Image& source, const std::vector<SampledFrame>& sampled, const CollageStyle& style = {});

// 7x9 bitmap digits, white on a black box with a 2*scale px margin, top-left at (x, y).
// Returns the stamped box.
Rect stamp_number(Image& img, int x, int y, int number, int scale = 1);

struct SelectionConfig {
  int parse_retries = 1;  // extra VLM calls after an unparseable reply
};

// Asks the VLM to pick a collage cell. Reply k >= 1 maps to that cell's frame,
// 0 keeps the source (frame_index 0). Replies that stay unparseable fall back
// to the last frame with `fallback` set; gateway errors propagate.
FrameSelection select_frame_auto(const Collage& collage, const EditTask& task, int frame_count, VlmGateway& gateway,
                                 const SelectionConfig& config = {}, const TranscriptSink& sink = {});

FrameSelection select_last(const VideoSequence& video);
FrameSelection select_last(int frame_count);

// Manual pick; index 0 keeps the source. Throws InvalidArgument outside {0} U [1..T].
FrameSelection select_manual(int frame_index, int frame_count);

}  // namespace f2f
