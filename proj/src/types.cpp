// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/types.hpp"

#include <cctype>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "f2f/error.hpp"
#include "f2f/text.hpp"

namespace f2f {

std::string format_timestamp(Timestamp t) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << (ms % 1000)
     << 'Z';
  return os.str();
}

Timestamp parse_timestamp(std::string_view iso) {
  std::tm tm{};
  std::istringstream is{std::string(iso)};
  is >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (is.fail()) throw ParseError("bad timestamp '" + std::string(iso) + "'");
  long ms = 0;
  if (is.peek() == '.') {
    is.get();
    std::string frac;
    while (std::isdigit(is.peek())) frac.push_back(static_cast<char>(is.get()));
    frac = (frac + "000").substr(0, 3);
    ms = std::stol(frac);
  }
  const auto secs = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + ms));
}

void TemporalCaption::validate() const {
  if (trim(text).empty()) throw InvalidArgument("temporal caption is empty");
  if (count_sentence_terminators(text) > 1)
    throw InvalidArgument("temporal caption must be a single sentence: '" + text + "'");
}

std::optional<std::string> EditTask::validate(bool strict_aspect) const {
  if (id.empty()) throw InvalidArgument("task id is empty");
  if (source_image.empty()) throw InvalidArgument("task " + id + ": source image is empty");
  if (trim(target_caption).empty()) throw InvalidArgument("task " + id + ": target caption is empty");
  if (temporal_caption) temporal_caption->validate();
  if (gt_target_image) {
    if (gt_target_image->empty()) throw InvalidArgument("task " + id + ": gt target image is empty");
    const auto lhs = static_cast<std::int64_t>(gt_target_image->width()) * source_image.height();
    const auto rhs = static_cast<std::int64_t>(source_image.width()) * gt_target_image->height();
    if (lhs != rhs) {
      std::string msg = "task " + id + ": gt target aspect ratio differs from source";
      if (strict_aspect) throw InvalidArgument(msg);
      return msg;
    }
  }
  return std::nullopt;
}

const Image& VideoSequence::frame(int index) const {
  if (index < 1 || index > frame_count())
    throw InvalidArgument("frame index " + std::to_string(index) + " outside [1.." +
                          std::to_string(frame_count()) + "]");
  return frames[static_cast<std::size_t>(index - 1)];
}

void VideoSequence::validate() const {
  if (frames.empty()) throw IntegrityError("video has no frames");
  for (const auto& f : frames)
    if (f.width() != frames.front().width() || f.height() != frames.front().height())
      throw IntegrityError("video frames differ in size");
}

std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::automatic:
      return "auto";
    case SelectionMethod::last:
      return "last";
    case SelectionMethod::manual:
      return "manual";
  }
  return "auto";
}

SelectionMethod parse_selection_method(std::string_view s) {
  if (s == "auto") return SelectionMethod::automatic;
  if (s == "last") return SelectionMethod::last;
  if (s == "manual") return SelectionMethod::manual;
  throw ParseError("unknown selection method '" + std::string(s) + "'");
}

void FrameSelection::validate(int frame_count) const {
  if (frame_index < 0 || frame_index > frame_count)
    throw InvalidArgument("selected frame " + std::to_string(frame_index) + " outside [0.." +
                          std::to_string(frame_count) + "]");
  if (method == SelectionMethod::last && frame_index != frame_count)
    throw InvalidArgument("last-frame selection must pick frame " + std::to_string(frame_count));
}

}  // namespace f2f
