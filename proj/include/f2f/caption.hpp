// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "f2f/types.hpp"
#include "f2f/vlm.hpp"

namespace f2f {

/// One in-context example: source image, target caption and the temporal
/// caption a good answer would give.
struct IclExample {
  Image image;
  std::string target_caption;
  std::string temporal_caption;

  void validate() const;
};

// The nine examples shipped with the library. Authored for this project
// (static camera, no new objects, one sentence); images are synthetic.
std::vector<IclExample> builtin_icl_bank();

// Directory layout: <dir>/<nn>/image.png, target.txt, temporal.txt; <nn> sorted.
std::vector<IclExample> load_icl_bank(const std::filesystem::path& dir);
void write_icl_bank(const std::filesystem::path& dir, const std::vector<IclExample>& bank);

struct PromptBundle {
  std::vector<VlmMessage> messages;
  std::string digest;
  int icl_count = 0;
};

struct PromptOptions {
  bool zero_shot = false;  // allow an empty bank
  int max_image_side = 512;
};

// Each example becomes a user turn (image + instruction with its target
// caption) followed by an assistant turn (its temporal caption); the query
// turn carries the task's source image and instruction.
PromptBundle build_prompt(const EditTask& task, const std::vector<IclExample>& bank, PromptOptions options = {});

struct CaptionConfig {
  std::vector<IclExample> bank = builtin_icl_bank();
  PromptOptions prompt;
  // Skip the VLM and use the target caption as-is (the "original captions" ablation arm).
  bool raw_caption = false;
  int min_words = 3;
};

// Strips whitespace and one layer of surrounding quotes.
std::string clean_caption_reply(std::string_view reply);
// Empty string when acceptable, otherwise the rejection reason.
std::string caption_rejection(std::string_view text, int min_words = 3);

TemporalCaption raw_temporal_caption(const EditTask& task);

// A rejected reply is retried once; a second rejection throws CaptionError.
TemporalCaption generate_temporal_caption(const EditTask& task, VlmGateway& gateway, const CaptionConfig& config,
                                          const TranscriptSink& sink = {});

}  // namespace f2f
