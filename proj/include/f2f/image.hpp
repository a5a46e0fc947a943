// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace f2f {

using Rgb = std::array<std::uint8_t, 3>;

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int right() const { return x + width; }
  int bottom() const { return y + height; }
  bool contains(const Rect& other) const {
    return other.x >= x && other.y >= y && other.right() <= right() && other.bottom() <= bottom();
  }
  bool intersects(const Rect& other) const {
    return x < other.right() && other.x < right() && y < other.bottom() && other.y < bottom();
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// 8-bit interleaved RGB raster, row-major, no padding.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {0, 0, 0});
  Image(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  Rect bounds() const { return {0, 0, width_, height_}; }

  std::span<const std::uint8_t> data() const { return pixels_; }
  std::span<std::uint8_t> data() { return pixels_; }

  const std::uint8_t* pixel(int x, int y) const { return &pixels_[index(x, y)]; }
  std::uint8_t* pixel(int x, int y) { return &pixels_[index(x, y)]; }
  Rgb at(int x, int y) const {
    const auto* p = pixel(x, y);
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    auto* p = pixel(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  void fill(const Rect& r, Rgb c);

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Bilinear resampling with half-pixel centers and edge clamping; resizing to
// the same size is the identity.
Image resize_bilinear(const Image& src, int width, int height);

// Integer-only box-filter resampling used where output must be bit-identical
// across platforms (collage thumbnails).
Image resize_box_integer(const Image& src, int width, int height);

Image crop(const Image& src, const Rect& region);

// Copies `src` into `dst` with its top-left corner at (x, y); must fit.
void blit(Image& dst, const Image& src, int x, int y);

// Largest centered square inside `src`.
Rect center_square(const Image& src);

double mse(const Image& a, const Image& b);
// Peak signal-to-noise ratio in dB; +infinity for identical images.
double psnr(const Image& a, const Image& b);
// Mean absolute per-channel difference in [0, 255].
double mean_abs_diff(const Image& a, const Image& b);

// SHA-256 over a header with the dimensions followed by the raw pixel bytes.
std::string pixel_digest(const Image& img);

}  // namespace f2f
