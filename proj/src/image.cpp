// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "f2f/error.hpp"
#include "f2f/hash.hpp"

namespace f2f {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InvalidArgument("negative image dimensions");
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill[0];
    pixels_[i + 1] = fill[1];
    pixels_[i + 2] = fill[2];
  }
}

Image::Image(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0) throw InvalidArgument("negative image dimensions");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
    throw InvalidArgument("pixel buffer size does not match dimensions");
}

void Image::fill(const Rect& r, Rgb c) {
  const int x0 = std::max(0, r.x), y0 = std::max(0, r.y);
  const int x1 = std::min(width_, r.right()), y1 = std::min(height_, r.bottom());
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) set(x, y, c);
}

namespace {

struct Tap {
  int i0;
  int i1;
  double w1;
};

std::vector<Tap> bilinear_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src - 1);
    taps[static_cast<std::size_t>(i)] = {i0, i1, s - i0};
  }
  return taps;
}

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

Image resize_bilinear(const Image& src, int width, int height) {
  if (src.empty()) throw InvalidArgument("resize of empty image");
  if (width <= 0 || height <= 0) throw InvalidArgument("resize to non-positive size");
  if (width == src.width() && height == src.height()) return src;

  const auto xs = bilinear_taps(src.width(), width);
  const auto ys = bilinear_taps(src.height(), height);
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    const auto& ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const auto& tx = xs[static_cast<std::size_t>(x)];
      const auto* p00 = src.pixel(tx.i0, ty.i0);
      const auto* p01 = src.pixel(tx.i1, ty.i0);
      const auto* p10 = src.pixel(tx.i0, ty.i1);
      const auto* p11 = src.pixel(tx.i1, ty.i1);
      auto* o = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        const double top = p00[c] + (p01[c] - p00[c]) * tx.w1;
        const double bot = p10[c] + (p11[c] - p10[c]) * tx.w1;
        o[c] = to_u8(top + (bot - top) * ty.w1);
      }
    }
  }
  return out;
}

Image resize_box_integer(const Image& src, int width, int height) {
  if (src.empty()) throw InvalidArgument("resize of empty image");
  if (width <= 0 || height <= 0) throw InvalidArgument("resize to non-positive size");
  const std::int64_t sw = src.width(), sh = src.height();
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    std::int64_t y0 = y * sh / height;
    std::int64_t y1 = std::max(y0 + 1, (y + 1) * sh / height);
    for (int x = 0; x < width; ++x) {
      std::int64_t x0 = x * sw / width;
      std::int64_t x1 = std::max(x0 + 1, (x + 1) * sw / width);
      std::int64_t sum[3] = {0, 0, 0};
      for (auto yy = y0; yy < y1; ++yy)
        for (auto xx = x0; xx < x1; ++xx) {
          const auto* p = src.pixel(static_cast<int>(xx), static_cast<int>(yy));
          sum[0] += p[0];
          sum[1] += p[1];
          sum[2] += p[2];
        }
      const std::int64_t n = (y1 - y0) * (x1 - x0);
      auto* o = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) o[c] = static_cast<std::uint8_t>((sum[c] + n / 2) / n);
    }
  }
  return out;
}

Image crop(const Image& src, const Rect& region) {
  if (region.width <= 0 || region.height <= 0 || !src.bounds().contains(region))
    throw InvalidArgument("crop region outside image");
  Image out(region.width, region.height);
  const std::size_t row = static_cast<std::size_t>(region.width) * 3;
  for (int y = 0; y < region.height; ++y)
    std::copy_n(src.pixel(region.x, region.y + y), row, out.pixel(0, y));
  return out;
}

void blit(Image& dst, const Image& src, int x, int y) {
  if (!dst.bounds().contains({x, y, src.width(), src.height()}))
    throw InvalidArgument("blit target outside destination");
  const std::size_t row = static_cast<std::size_t>(src.width()) * 3;
  for (int r = 0; r < src.height(); ++r) std::copy_n(src.pixel(0, r), row, dst.pixel(x, y + r));
}

Rect center_square(const Image& src) {
  const int side = std::min(src.width(), src.height());
  return {(src.width() - side) / 2, (src.height() - side) / 2, side, side};
}

namespace {
void require_same_size(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw InvalidArgument("image sizes differ");
  if (a.empty()) throw InvalidArgument("empty image");
}
}  // namespace

double mse(const Image& a, const Image& b) {
  require_same_size(a, b);
  const auto da = a.data(), db = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(da.size());
}

double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double mean_abs_diff(const Image& a, const Image& b) {
  require_same_size(a, b);
  const auto da = a.data(), db = b.data();
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < da.size(); ++i) acc += static_cast<std::uint64_t>(std::abs(da[i] - db[i]));
  return static_cast<double>(acc) / static_cast<double>(da.size());
}

std::string pixel_digest(const Image& img) {
  Sha256 h;
  h.update("f2f.rgb8\n" + std::to_string(img.width()) + "x" + std::to_string(img.height()) + "\n");
  h.update(img.data());
  return h.finish_hex();
}

}  // namespace f2f
