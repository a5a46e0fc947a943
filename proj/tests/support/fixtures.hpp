// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures for the unit and acceptance suites.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "f2f/image.hpp"
#include "f2f/types.hpp"

namespace f2f::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "f2f-test") {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline Image random_image(std::mt19937_64& rng, int w, int h) {
  Image img(w, h);
  for (auto& b : img.data()) b = static_cast<std::uint8_t>(rng() >> 56);
  return img;
}

// Ten smooth, band-limited square images (gradients and low-frequency waves).
inline Image smooth_fixture(int index, int size = 256) {
  Image img(size, size);
  const double f = 1.0 + index % 4;
  const double phase = 0.7 * index;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double u = static_cast<double>(x) / size, v = static_cast<double>(y) / size;
      const double r = 127.5 + 120.0 * std::sin(2 * std::numbers::pi * (f * u + 0.5 * v) + phase);
      const double g = 255.0 * (0.5 * u + 0.5 * v);
      const double b = 127.5 + 120.0 * std::cos(2 * std::numbers::pi * (0.5 * u - f * 0.5 * v) - phase);
      img.set(x, y, {static_cast<std::uint8_t>(std::lround(r)), static_cast<std::uint8_t>(std::lround(g)),
                     static_cast<std::uint8_t>(std::lround(b))});
    }
  return img;
}

// Integer-only pattern; identical bytes on every platform.
inline Image integer_pattern(int w, int h, int t) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.set(x, y, {static_cast<std::uint8_t>((x * 3 + t * 5) & 0xFF), static_cast<std::uint8_t>((y * 2 + t) & 0xFF),
                     static_cast<std::uint8_t>(((x ^ y) + 7 * t) & 0xFF)});
  return img;
}

// Shapes on a gradient background: the end-to-end fixture.
inline Image scene_fixture(int size = 256) {
  Image img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      img.set(x, y, {static_cast<std::uint8_t>(x * 255 / (size - 1)), static_cast<std::uint8_t>(y * 255 / (size - 1)),
                     static_cast<std::uint8_t>(128)});
  const int c = size / 2, r = size / 5;
  for (int y = c - r; y < c + r; ++y)
    for (int x = c - r; x < c + r; ++x)
      if ((x - c) * (x - c) + (y - c) * (y - c) <= r * r) img.set(x, y, {220, 30, 30});
  return img;
}

inline EditTask make_task(const std::string& id, Image source, const std::string& prompt) {
  EditTask t;
  t.id = id;
  t.source_image = std::move(source);
  t.target_caption = prompt;
  return t;
}

}  // namespace f2f::testing
