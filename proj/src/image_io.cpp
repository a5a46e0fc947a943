// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>

#include <cmath>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"

namespace f2f {

namespace fs = std::filesystem;

namespace {

cv::Mat to_bgr_mat(const Image& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    const auto* src = img.pixel(0, y);
    auto* dst = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      dst[3 * x + 0] = src[3 * x + 2];
      dst[3 * x + 1] = src[3 * x + 1];
      dst[3 * x + 2] = src[3 * x + 0];
    }
  }
  return m;
}

Image from_bgr_mat(const cv::Mat& in) {
  cv::Mat m = in;
  if (m.depth() != CV_8U) throw InvalidArgument("only 8-bit images are supported");
  if (m.channels() == 1) cv::cvtColor(m, m, cv::COLOR_GRAY2BGR);
  if (m.channels() == 4) cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
  Image img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const auto* src = m.ptr<std::uint8_t>(y);
    auto* dst = img.pixel(0, y);
    for (int x = 0; x < m.cols; ++x) {
      dst[3 * x + 0] = src[3 * x + 2];
      dst[3 * x + 1] = src[3 * x + 1];
      dst[3 * x + 2] = src[3 * x + 0];
    }
  }
  return img;
}

}  // namespace

std::string encode_png(const Image& img) {
  if (img.empty()) throw InvalidArgument("cannot encode an empty image");
  std::vector<uchar> buf;
  if (!cv::imencode(".png", to_bgr_mat(img), buf)) throw Error("PNG encoding failed");
  return std::string(buf.begin(), buf.end());
}

Image decode_image(std::string_view bytes) {
  if (bytes.empty()) throw InvalidArgument("empty image payload");
  cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
  cv::Mat m = cv::imdecode(raw, cv::IMREAD_COLOR);
  if (m.empty()) throw InvalidArgument("payload is not a decodable image");
  return from_bgr_mat(m);
}

Image read_image(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_image(bytes);
  } catch (const InvalidArgument&) {
    throw IoError("cannot decode image", path);
  }
}

void write_png(const Image& img, const fs::path& path) { write_file_atomic(path, encode_png(img)); }

std::vector<Image> extract_frames(const fs::path& container, int fps) {
  (void)fps;  // frames are returned at their native rate; fps is recorded by the caller
  if (!fs::exists(container)) throw IoError("video container not found", container);
  cv::VideoCapture cap(container.string(), cv::CAP_FFMPEG);
  if (!cap.isOpened()) throw IoError("cannot open video container", container);

  const double declared = cap.get(cv::CAP_PROP_FRAME_COUNT);
  std::vector<Image> frames;
  cv::Mat m;
  while (cap.read(m)) {
    if (m.empty()) break;
    frames.push_back(from_bgr_mat(m));
  }
  if (frames.empty()) throw IoError("video container holds no frames", container);
  if (declared > 0 && static_cast<double>(frames.size()) < std::floor(declared))
    throw IoError("video truncated: decoded " + std::to_string(frames.size()) + " of " +
                      std::to_string(static_cast<long>(declared)) + " frames",
                  container);
  for (const auto& f : frames)
    if (f.width() != frames.front().width() || f.height() != frames.front().height())
      throw IoError("video frames change size mid-stream", container);
  return frames;
}

void encode_frames(const std::vector<Image>& frames, int fps, const fs::path& container) {
  if (frames.empty()) throw InvalidArgument("no frames to encode");
  const auto ext = container.extension().string();
  const int fourcc = (ext == ".mkv" || ext == ".avi") ? cv::VideoWriter::fourcc('F', 'F', 'V', '1')
                                                      : cv::VideoWriter::fourcc('m', 'p', '4', 'v');
  if (container.has_parent_path()) fs::create_directories(container.parent_path());
  cv::VideoWriter writer(container.string(), cv::CAP_FFMPEG, fourcc, fps,
                         cv::Size(frames.front().width(), frames.front().height()));
  if (!writer.isOpened()) throw IoError("cannot open video writer", container);
  for (const auto& f : frames) writer.write(to_bgr_mat(f));
  writer.release();
}

}  // namespace f2f
