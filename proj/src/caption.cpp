// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/caption.hpp"

#include <algorithm>
#include <chrono>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"
#include "f2f/prompts.hpp"
#include "f2f/text.hpp"

namespace f2f {

namespace fs = std::filesystem;

void IclExample::validate() const {
  if (image.empty()) throw InvalidArgument("ICL example image is empty");
  if (trim(target_caption).empty()) throw InvalidArgument("ICL example target caption is empty");
  if (trim(temporal_caption).empty()) throw InvalidArgument("ICL example temporal caption is empty");
}

namespace {

void fill_disc(Image& img, int cx, int cy, int r, Rgb c) {
  for (int y = std::max(0, cy - r); y < std::min(img.height(), cy + r + 1); ++y)
    for (int x = std::max(0, cx - r); x < std::min(img.width(), cx + r + 1); ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.set(x, y, c);
}

Image scene(Rgb sky, Rgb ground, int horizon) {
  Image img(256, 256, sky);
  img.fill({0, horizon, 256, 256 - horizon}, ground);
  return img;
}

struct Entry {
  const char* target;
  const char* temporal;
};

// Captions authored for the bundled bank.
constexpr Entry kEntries[9] = {
    {"A photo of a dog sitting.",
     "The standing dog slowly lowers its hindquarters until it sits calmly on the ground."},
    {"A photo of a bird spreading its wings.",
     "The perched bird gradually lifts and opens its wings wide while staying on the branch."},
    {"A photo of a melted ice cube.", "The ice cube on the table slowly melts into a small puddle of water."},
    {"A photo of a person waving.", "The person slowly raises their right hand and gently waves it from side to side."},
    {"A photo of a blooming flower.", "The closed flower bud gradually unfolds its petals into a full bloom."},
    {"A photo of a cat lying down.", "The sitting cat slowly stretches forward and settles down onto its belly."},
    {"A photo of a car with its door open.", "The driver's door of the parked car slowly swings fully open."},
    {"A photo of a snowy street.", "Snow gradually falls and settles until the street is covered in a white layer."},
    {"A photo of a smiling woman.", "The woman's neutral expression slowly softens into a warm, wide smile."},
};

Image builtin_image(int i) {
  switch (i) {
    case 0: {  // dog standing on grass
      auto img = scene({150, 200, 235}, {70, 140, 60}, 170);
      img.fill({70, 120, 110, 40}, {140, 90, 50});
      fill_disc(img, 185, 115, 22, {140, 90, 50});
      for (int leg : {75, 100, 150, 170}) img.fill({leg, 160, 10, 30}, {120, 75, 40});
      return img;
    }
    case 1: {  // bird on a branch
      auto img = scene({170, 210, 240}, {170, 210, 240}, 256);
      img.fill({20, 170, 216, 12}, {90, 60, 30});
      fill_disc(img, 128, 145, 24, {200, 60, 50});
      fill_disc(img, 150, 120, 12, {200, 60, 50});
      return img;
    }
    case 2: {  // ice cube on a table
      auto img = scene({225, 220, 210}, {120, 80, 50}, 150);
      img.fill({98, 100, 60, 60}, {200, 230, 245});
      return img;
    }
    case 3: {  // person standing
      auto img = scene({200, 200, 205}, {90, 90, 95}, 220);
      fill_disc(img, 128, 60, 20, {230, 190, 160});
      img.fill({108, 82, 40, 80}, {40, 80, 160});
      img.fill({96, 84, 10, 70}, {230, 190, 160});
      img.fill({150, 84, 10, 70}, {230, 190, 160});
      img.fill({110, 162, 14, 58}, {50, 50, 60});
      img.fill({132, 162, 14, 58}, {50, 50, 60});
      return img;
    }
    case 4: {  // flower bud
      auto img = scene({180, 220, 240}, {80, 150, 70}, 200);
      img.fill({124, 110, 8, 90}, {50, 120, 40});
      fill_disc(img, 128, 100, 14, {220, 80, 140});
      return img;
    }
    case 5: {  // sitting cat
      auto img = scene({235, 230, 220}, {160, 130, 100}, 190);
      fill_disc(img, 128, 150, 36, {110, 110, 115});
      fill_disc(img, 128, 100, 22, {110, 110, 115});
      return img;
    }
    case 6: {  // parked car
      auto img = scene({160, 200, 235}, {100, 100, 100}, 180);
      img.fill({50, 130, 160, 50}, {190, 30, 30});
      img.fill({90, 105, 80, 30}, {190, 30, 30});
      fill_disc(img, 85, 182, 16, {20, 20, 20});
      fill_disc(img, 175, 182, 16, {20, 20, 20});
      return img;
    }
    case 7: {  // street
      auto img = scene({140, 150, 170}, {80, 80, 85}, 160);
      img.fill({20, 70, 60, 90}, {150, 90, 70});
      img.fill({176, 60, 60, 100}, {120, 110, 100});
      return img;
    }
    default: {  // face
      auto img = scene({220, 210, 200}, {220, 210, 200}, 256);
      fill_disc(img, 128, 128, 70, {235, 195, 165});
      fill_disc(img, 103, 110, 7, {40, 30, 30});
      fill_disc(img, 153, 110, 7, {40, 30, 30});
      img.fill({103, 165, 50, 5}, {150, 60, 60});
      return img;
    }
  }
}

Image fit_within(const Image& img, int max_side) {
  const int longest = std::max(img.width(), img.height());
  if (max_side <= 0 || longest <= max_side) return img;
  const int w = std::max(1, static_cast<int>(static_cast<std::int64_t>(img.width()) * max_side / longest));
  const int h = std::max(1, static_cast<int>(static_cast<std::int64_t>(img.height()) * max_side / longest));
  return resize_bilinear(img, w, h);
}

std::string read_text(const fs::path& p) { return std::string(trim(read_file(p))); }

}  // namespace

std::vector<IclExample> builtin_icl_bank() {
  std::vector<IclExample> bank;
  for (int i = 0; i < 9; ++i) bank.push_back({builtin_image(i), kEntries[i].target, kEntries[i].temporal});
  return bank;
}

std::vector<IclExample> load_icl_bank(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw NotFound("ICL bank directory not found: " + dir.string());
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  std::vector<IclExample> bank;
  for (const auto& e : entries) {
    IclExample ex{read_image(e / "image.png"), read_text(e / "target.txt"), read_text(e / "temporal.txt")};
    ex.validate();
    bank.push_back(std::move(ex));
  }
  return bank;
}

void write_icl_bank(const fs::path& dir, const std::vector<IclExample>& bank) {
  for (std::size_t i = 0; i < bank.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%02zu", i + 1);
    const auto d = dir / name;
    write_png(bank[i].image, d / "image.png");
    write_file_atomic(d / "target.txt", bank[i].target_caption + "\n");
    write_file_atomic(d / "temporal.txt", bank[i].temporal_caption + "\n");
  }
}

PromptBundle build_prompt(const EditTask& task, const std::vector<IclExample>& bank, PromptOptions options) {
  if (bank.empty() && !options.zero_shot)
    throw InvalidArgument("ICL bank is empty; enable zero-shot mode to caption without examples");
  if (task.source_image.empty()) throw InvalidArgument("task " + task.id + " has no source image");
  if (trim(task.target_caption).empty()) throw InvalidArgument("task " + task.id + " has an empty target caption");

  PromptBundle bundle;
  for (const auto& ex : bank) {
    ex.validate();
    bundle.messages.push_back(
        {Role::user,
         {VlmPart::image(fit_within(ex.image, options.max_image_side)),
          VlmPart::text(prompts::caption_instruction(ex.target_caption))}});
    bundle.messages.push_back({Role::assistant, {VlmPart::text(ex.temporal_caption)}});
  }
  bundle.messages.push_back({Role::user,
                             {VlmPart::image(fit_within(task.source_image, options.max_image_side)),
                              VlmPart::text(prompts::caption_instruction(task.target_caption))}});
  bundle.icl_count = static_cast<int>(bank.size());

  CanonicalWriter w("f2f.prompt.v1");
  w.field("template", prompts::kCaptionTemplateVersion);
  for (const auto& m : bundle.messages) {
    w.field("role", to_string(m.role));
    for (const auto& p : m.parts) {
      if (const auto* t = std::get_if<std::string>(&p.content))
        w.field("text", *t);
      else
        w.field("image", sha256_hex(std::get<ImagePart>(p.content).bytes));
    }
  }
  bundle.digest = w.digest();
  return bundle;
}

std::string clean_caption_reply(std::string_view reply) {
  auto s = trim(reply);
  auto strip_pair = [&](std::string_view open, std::string_view close) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      s.remove_prefix(open.size());
      s.remove_suffix(close.size());
      s = trim(s);
      return true;
    }
    return false;
  };
  strip_pair("\"", "\"") || strip_pair("'", "'") || strip_pair("\xE2\x80\x9C", "\xE2\x80\x9D") ||
      strip_pair("`", "`");
  return normalize_whitespace(s);
}

std::string caption_rejection(std::string_view text, int min_words) {
  if (text.empty()) return "empty caption";
  const auto sentences = count_sentence_terminators(text);
  if (sentences > 1) return "caption has " + std::to_string(sentences) + " sentences";
  const auto words = count_words(text);
  if (words < static_cast<std::size_t>(min_words)) return "caption has only " + std::to_string(words) + " words";
  return {};
}

TemporalCaption raw_temporal_caption(const EditTask& task) {
  TemporalCaption c;
  c.text = task.target_caption;
  c.generator_id = "raw-caption";
  c.created_at = std::chrono::system_clock::now();
  return c;
}

TemporalCaption generate_temporal_caption(const EditTask& task, VlmGateway& gateway, const CaptionConfig& config,
                                          const TranscriptSink& sink) {
  if (config.raw_caption) return raw_temporal_caption(task);

  const auto bundle = build_prompt(task, config.bank, config.prompt);
  std::string reason;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto text = clean_caption_reply(gateway.chat(bundle.messages, sink));
    reason = caption_rejection(text, config.min_words);
    if (reason.empty()) {
      TemporalCaption c;
      c.text = text;
      c.generator_id = gateway.adapter_id() + ":" + gateway.config().model_id;
      c.prompt_digest = bundle.digest;
      c.created_at = std::chrono::system_clock::now();
      return c;
    }
  }
  throw CaptionError("task " + task.id + ": temporal caption rejected after retry (" + reason + ")");
}

}  // namespace f2f
