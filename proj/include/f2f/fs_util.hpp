// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace f2f {

std::string read_file(const std::filesystem::path& path);

// Writes to a uniquely named sibling temp file, then renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Appends one line (newline added) under an exclusive file lock.
void append_line(const std::filesystem::path& path, std::string_view line);

// Unique sibling path for staging a file or directory before rename.
std::filesystem::path staging_path(const std::filesystem::path& target);

}  // namespace f2f
