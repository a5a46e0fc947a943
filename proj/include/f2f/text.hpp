// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace f2f {

std::string_view trim(std::string_view s);

// Collapses internal whitespace runs to one space and trims the ends.
std::string normalize_whitespace(std::string_view s);

// Counts runs of '.', '!' or '?' that end the text or are followed by whitespace.
std::size_t count_sentence_terminators(std::string_view s);

std::size_t count_words(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

// Replaces every occurrence of `from` with `to`.
std::string replace_all(std::string_view s, std::string_view from, std::string_view to);

}  // namespace f2f
