// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "f2f/error.hpp"

namespace f2f {

class SelectionParseError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Extracts x from "The selected edit is:x". Whitespace around the reply and
// after the colon, markdown emphasis around x, and trailing punctuation are
// tolerated; the last occurrence wins. Returns a value in [0, num_choices];
// anything unparseable or out of range throws SelectionParseError (never clamps).
int parse_selection_reply(std::string_view reply, int num_choices);

}  // namespace f2f
