// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "f2f/image.hpp"

namespace f2f {

std::string encode_png(const Image& img);
// Throws InvalidArgument when the bytes are not a decodable image.
Image decode_image(std::string_view bytes);

Image read_image(const std::filesystem::path& path);
// Atomic: encodes to a sibling temp file and renames over `path`.
void write_png(const Image& img, const std::filesystem::path& path);

// Decodes every frame of a video container in order. Throws IoError when the
// container cannot be opened, holds no frames, or ends before the frame count
// its header declares; no partial result is returned.
std::vector<Image> extract_frames(const std::filesystem::path& container, int fps);

// Writes a lossless FFV1 stream for .avi/.mkv, MPEG-4 Part 2 otherwise. Used by
// tests and stub remote backends.
void encode_frames(const std::vector<Image>& frames, int fps, const std::filesystem::path& container);

}  // namespace f2f
