// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/prompts.hpp"

#include "f2f/text.hpp"

namespace f2f::prompts {

namespace {

constexpr std::string_view kCaptionTemplate =
    "Write a one-sentence description of a short video that begins with the provided image and smoothly "
    "transitions into a scene of a \"CAPTION\",\n"
    "highlighting how elements in the image undergo changes or movement over time.\n"
    "Keep the description simple, concise and short, focusing only on essential changes and actions without "
    "altering unnecessary details.\n"
    "Avoid mentioning elements that do not contribute to the main change needed, and focus the description on "
    "the main transitions.\n"
    "Do not add objects that are not in the original image or described in the final scene.\n"
    "The camera should remain static unless movement is absolutely necessary.\n"
    "Ensure all transitions happen within a few second duration without mentioning the length or using the "
    "word \"video\".";

constexpr std::string_view kSelectionTemplate =
    "The image displays the source photo at the top, with a collage of 12 edited versions beneath it.\n"
    "The target edit image caption was: \"CAPTION\".\n"
    "Your task is to choose the image from 1 to 12 that best follows this edit fully and naturally.\n"
    "If none of the images follows the edit, select image 0.\n"
    "If multiple images follow the edit equally, prioritize the one with the lowest number possible.\n"
    "Avoid selecting images that appear to follow the edit but are not edits of the original image.\n"
    "Additionally, avoid images where camera motion, zoom, or image quality differs significantly, or where the "
    "content does not appear stable relative to the original source.\n"
    "Respond with: \"The selected edit is:x\" where x is the number of your chosen edit.";

}  // namespace

std::string_view caption_template() { return kCaptionTemplate; }
std::string_view selection_template() { return kSelectionTemplate; }

std::string caption_instruction(std::string_view target_caption) {
  return replace_all(kCaptionTemplate, "\"CAPTION\"", "\"" + std::string(target_caption) + "\"");
}

std::string selection_instruction(std::string_view target_caption, int num_choices) {
  std::string text(kSelectionTemplate);
  if (num_choices != 12) {
    const auto n = std::to_string(num_choices);
    text = replace_all(text, "a collage of 12 edited", "a collage of " + n + " edited");
    text = replace_all(text, "from 1 to 12", "from 1 to " + n);
  }
  return replace_all(text, "\"CAPTION\"", "\"" + std::string(target_caption) + "\"");
}

}  // namespace f2f::prompts
