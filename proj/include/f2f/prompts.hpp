// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace f2f::prompts {

// Version tags change whenever a template's bytes change; tests pin digests.
inline constexpr std::string_view kCaptionTemplateVersion = "caption-instruction/v1";
inline constexpr std::string_view kSelectionTemplateVersion = "selection-instruction/v1";

// Placeholder replaced by the task's target caption.
inline constexpr std::string_view kCaptionPlaceholder = "CAPTION";

std::string_view caption_template();
std::string_view selection_template();

std::string caption_instruction(std::string_view target_caption);

// `num_choices` other than 12 rewrites the count phrases; 12 yields the template verbatim.
std::string selection_instruction(std::string_view target_caption, int num_choices = 12);

}  // namespace f2f::prompts
