// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/selector.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "f2f/error.hpp"
#include "f2f/prompts.hpp"
#include "f2f/reply_parser.hpp"

namespace f2f {

std::vector<int> sampled_indices(int frame_count, int stride) {
  if (stride < 1) throw InvalidArgument("stride must be >= 1");
  if (frame_count < stride + 1)
    throw InvalidArgument("video of " + std::to_string(frame_count) + " frames is too short for stride " +
                          std::to_string(stride));
  std::vector<int> out;
  for (int idx = stride; idx <= frame_count; idx += stride)
    if (idx > 1) out.push_back(idx);
  return out;
}

std::vector<SampledFrame> sample_frames(const VideoSequence& video, int stride) {
  std::vector<SampledFrame> out;
  int id = 0;
  for (int idx : sampled_indices(video.frame_count(), stride)) out.push_back({++id, idx, video.frame(idx)});
  return out;
}

const CollageCell& Collage::cell(int identifier) const {
  for (const auto& c : cells)
    if (c.identifier == identifier) return c;
  throw InvalidArgument("collage has no cell " + std::to_string(identifier));
}

namespace {

// Rows top to bottom; bit 6 is the leftmost column.
constexpr std::array<std::array<std::uint8_t, 9>, 10> kDigits = {{
    {0x3E, 0x63, 0x67, 0x6F, 0x7B, 0x73, 0x63, 0x63, 0x3E},
    {0x0C, 0x1C, 0x3C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x3F},
    {0x3E, 0x63, 0x03, 0x06, 0x0C, 0x18, 0x30, 0x60, 0x7F},
    {0x3E, 0x63, 0x03, 0x1E, 0x03, 0x03, 0x03, 0x63, 0x3E},
    {0x06, 0x0E, 0x1E, 0x36, 0x66, 0x7F, 0x06, 0x06, 0x06},
    {0x7F, 0x60, 0x60, 0x7E, 0x03, 0x03, 0x03, 0x63, 0x3E},
    {0x1E, 0x30, 0x60, 0x7E, 0x63, 0x63, 0x63, 0x63, 0x3E},
    {0x7F, 0x03, 0x06, 0x0C, 0x18, 0x18, 0x18, 0x18, 0x18},
    {0x3E, 0x63, 0x63, 0x3E, 0x63, 0x63, 0x63, 0x63, 0x3E},
    {0x3E, 0x63, 0x63, 0x63, 0x3F, 0x03, 0x03, 0x06, 0x3C},
}};
constexpr int kGlyphW = 7;
constexpr int kGlyphH = 9;

}  // namespace

Rect stamp_number(Image& img, int x, int y, int number, int scale) {
  if (number < 0) throw InvalidArgument("cannot stamp a negative number");
  scale = std::max(1, scale);
  const auto digits = std::to_string(number);
  const int n = static_cast<int>(digits.size());
  const int margin = 2 * scale;
  Rect box{x, y, 2 * margin + n * kGlyphW * scale + (n - 1) * scale, 2 * margin + kGlyphH * scale};
  img.fill(box, {0, 0, 0});
  for (int i = 0; i < n; ++i) {
    const auto& glyph = kDigits[static_cast<std::size_t>(digits[static_cast<std::size_t>(i)] - '0')];
    const int gx = x + margin + i * (kGlyphW + 1) * scale;
    for (int row = 0; row < kGlyphH; ++row)
      for (int col = 0; col < kGlyphW; ++col)
        if (glyph[static_cast<std::size_t>(row)] & (0x40 >> col))
          img.fill({gx + col * scale, y + margin + row * scale, scale, scale}, {255, 255, 255});
  }
  return box;
}

Collage build_collage(const Image& source, const std::vector<SampledFrame>& sampled, const CollageStyle& style) {
  const int n = static_cast<int>(sampled.size());
  if (n < 1 || n > kMaxCollageCells)
    throw InvalidArgument("collage needs 1.." + std::to_string(kMaxCollageCells) + " frames, got " +
                          std::to_string(n));
  if (source.empty()) throw InvalidArgument("collage source image is empty");
  const int fw = sampled.front().frame.width(), fh = sampled.front().frame.height();
  for (const auto& s : sampled)
    if (s.frame.width() != fw || s.frame.height() != fh) throw InvalidArgument("collage frames differ in size");

  const int tw = std::max(1, fw / style.thumb_divisor);
  const int th = std::max(1, fh / style.thumb_divisor);
  const int gap = style.gap;

  Collage c;
  c.cols = std::min(n, kCollageColumns);
  c.rows = (n + kCollageColumns - 1) / kCollageColumns;
  const int width = gap + c.cols * (tw + gap);
  const int src_scale = c.cols >= 2 ? 2 : 1;
  const int box_w = tw * src_scale, box_h = th * src_scale;
  // Fit the source inside the box without distorting it.
  int sw = box_w, sh = box_h;
  if (static_cast<std::int64_t>(source.width()) * box_h <= static_cast<std::int64_t>(source.height()) * box_w)
    sw = std::max(1, static_cast<int>(static_cast<std::int64_t>(source.width()) * box_h / source.height()));
  else
    sh = std::max(1, static_cast<int>(static_cast<std::int64_t>(source.height()) * box_w / source.width()));
  const int grid_top = gap + box_h + gap;
  const int height = grid_top + c.rows * (th + gap);

  c.image = Image(width, height, style.background);
  c.source_slot = {(width - sw) / 2, gap + (box_h - sh) / 2, sw, sh};
  blit(c.image, resize_box_integer(source, sw, sh), c.source_slot.x, c.source_slot.y);

  const int stamp_scale = std::max(1, th / 80);
  for (int k = 1; k <= n; ++k) {
    const auto& s = sampled[static_cast<std::size_t>(k - 1)];
    const int row = (k - 1) / kCollageColumns;
    const int col = (k - 1) % kCollageColumns;
    const Rect region{gap + col * (tw + gap), grid_top + row * (th + gap), tw, th};
    blit(c.image, resize_box_integer(s.frame, tw, th), region.x, region.y);
    stamp_number(c.image, region.x, region.y, s.identifier, stamp_scale);
    c.cells.push_back({s.identifier, region, s.frame_index});
  }
  return c;
}

FrameSelection select_frame_auto(const Collage& collage, const EditTask& task, int frame_count, VlmGateway& gateway,
                                 const SelectionConfig& config, const TranscriptSink& sink) {
  const int choices = static_cast<int>(collage.cells.size());
  const std::vector<VlmMessage> messages{
      {Role::user,
       {VlmPart::image(collage.image), VlmPart::text(prompts::selection_instruction(task.target_caption, choices))}}};

  FrameSelection sel;
  sel.method = SelectionMethod::automatic;
  sel.collage_digest = collage.digest();
  std::string last_error;
  for (int attempt = 0; attempt <= config.parse_retries; ++attempt) {
    const auto reply = gateway.chat(messages, sink);
    sel.vlm_reply = reply;
    try {
      const int k = parse_selection_reply(reply, choices);
      sel.identifier = k;
      sel.frame_index = k == 0 ? 0 : collage.cell(k).frame_index;
      return sel;
    } catch (const SelectionParseError& e) {
      last_error = e.what();
    }
  }
  sel.identifier.reset();
  sel.frame_index = frame_count;
  sel.fallback = true;
  sel.warning = "unparseable selection reply, fell back to last frame: " + last_error;
  return sel;
}

FrameSelection select_last(int frame_count) {
  if (frame_count < 1) throw InvalidArgument("cannot select from an empty video");
  FrameSelection sel;
  sel.method = SelectionMethod::last;
  sel.frame_index = frame_count;
  return sel;
}

FrameSelection select_last(const VideoSequence& video) { return select_last(video.frame_count()); }

FrameSelection select_manual(int frame_index, int frame_count) {
  if (frame_index < 0 || frame_index > frame_count)
    throw InvalidArgument("frame index " + std::to_string(frame_index) + " outside {0} U [1.." +
                          std::to_string(frame_count) + "]");
  FrameSelection sel;
  sel.method = SelectionMethod::manual;
  sel.frame_index = frame_index;
  return sel;
}

}  // namespace f2f
