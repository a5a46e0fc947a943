// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/reply_parser.hpp"

#include <regex>
#include <string>

namespace f2f {

int parse_selection_reply(std::string_view reply, int num_choices) {
  if (num_choices < 1) throw InvalidArgument("num_choices must be >= 1");

  static const std::regex pattern(R"(the\s+selected\s+edit\s+is\s*:\s*[*_`"']*\s*([0-9]+)([^\s]*))",
                                  std::regex::icase | std::regex::ECMAScript);
  const std::string text(reply);
  std::smatch last;
  bool found = false;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator(); ++it) {
    last = *it;
    found = true;
  }
  if (!found) throw SelectionParseError("no 'The selected edit is:x' pattern in reply");

  // Whatever is glued to the number may only be closing punctuation/emphasis.
  const std::string tail = last[2].str();
  for (char c : tail)
    if (std::string_view(".,;:!?)]}*_`\"'").find(c) == std::string_view::npos)
      throw SelectionParseError("unexpected text after selection number: '" + last[1].str() + tail + "'");

  const std::string digits = last[1].str();
  if (digits.size() > 6) throw SelectionParseError("selection number too large: " + digits);
  const int value = std::stoi(digits);
  if (value > num_choices)
    throw SelectionParseError("selection " + std::to_string(value) + " exceeds " + std::to_string(num_choices) +
                              " choices");
  return value;
}

}  // namespace f2f
