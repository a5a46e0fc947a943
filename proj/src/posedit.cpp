// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/posedit.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"
#include "f2f/job_store.hpp"
#include "f2f/manifest.hpp"
#include "f2f/records.hpp"

namespace f2f {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kImageExt{".png", ".jpg", ".jpeg", ".bmp"};
const std::set<std::string> kVideoExt{".avi", ".mp4", ".mkv", ".mov"};

std::string lower_ext(const fs::path& p) {
  auto e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

}  // namespace

PoseEditSpec PoseEditSpec::load(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  PoseEditSpec spec;
  try {
    spec.source_description = j.value("source_description", std::string(kNeutralPoseDescription));
    for (const auto& c : j.at("categories")) {
      spec.categories.push_back({c.at("action").get<std::string>(), c.at("prompt").get<std::string>(),
                                 c.value("temporal_caption", std::string()), c.value("peak_index", 1)});
    }
    if (j.contains("records"))
      for (const auto& r : j["records"]) {
        PoseCellOverride o;
        if (r.contains("source_index")) o.source_index = r["source_index"].get<int>();
        if (r.contains("peak_index")) o.peak_index = r["peak_index"].get<int>();
        o.exclude = r.value("exclude", false);
        spec.overrides[{r.at("subject").get<std::string>(), r.at("action").get<std::string>()}] = o;
      }
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  spec.validate();
  return spec;
}

void PoseEditSpec::save(const fs::path& path) const {
  Json j{{"source_description", source_description}, {"categories", Json::array()}, {"records", Json::array()}};
  for (const auto& c : categories)
    j["categories"].push_back(
        {{"action", c.action}, {"prompt", c.prompt}, {"temporal_caption", c.temporal_caption}, {"peak_index", c.peak_index}});
  for (const auto& [key, o] : overrides) {
    Json r{{"subject", key.first}, {"action", key.second}};
    if (o.source_index) r["source_index"] = *o.source_index;
    if (o.peak_index) r["peak_index"] = *o.peak_index;
    if (o.exclude) r["exclude"] = true;
    j["records"].push_back(r);
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

void PoseEditSpec::validate() const {
  if (categories.empty()) throw InvalidArgument("pose spec has no categories");
  std::set<std::string> seen;
  for (const auto& c : categories) {
    validate_job_id(c.action);
    if (!seen.insert(c.action).second) throw InvalidArgument("duplicate pose category " + c.action);
    if (c.prompt.empty()) throw InvalidArgument("pose category " + c.action + " has no prompt");
    if (c.peak_index < 1) throw InvalidArgument("pose category " + c.action + " peak index must be >= 1");
    if (!c.temporal_caption.empty()) TemporalCaption{c.temporal_caption, "posedit-spec", "", {}}.validate();
  }
}

std::optional<std::vector<Image>> load_clip(const fs::path& corpus, const std::string& subject,
                                            const std::string& action) {
  const auto dir = corpus / subject / action;
  if (fs::is_directory(dir)) {
    std::vector<fs::path> images, videos;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      const auto ext = lower_ext(e.path());
      if (kImageExt.contains(ext)) images.push_back(e.path());
      if (kVideoExt.contains(ext)) videos.push_back(e.path());
    }
    if (!images.empty()) {
      std::sort(images.begin(), images.end());
      std::vector<Image> frames;
      for (const auto& p : images) frames.push_back(read_image(p));
      return frames;
    }
    if (videos.size() == 1) return extract_frames(videos.front(), 0);
    if (videos.size() > 1) throw InvalidArgument("clip directory " + dir.string() + " holds several videos");
    return std::nullopt;
  }
  for (const auto& ext : kVideoExt) {
    const auto file = corpus / subject / (action + ext);
    if (fs::is_regular_file(file)) return extract_frames(file, 0);
  }
  return std::nullopt;
}

PoseEditBuild build_posedit(const fs::path& corpus, const PoseEditSpec& spec, const fs::path& out) {
  spec.validate();
  if (!fs::is_directory(corpus)) throw NotFound("corpus directory " + corpus.string() + " does not exist");

  std::vector<std::string> subjects;
  for (const auto& e : fs::directory_iterator(corpus))
    if (e.is_directory() && e.path().filename().string().front() != '.')
      subjects.push_back(e.path().filename().string());
  std::sort(subjects.begin(), subjects.end());

  PoseEditBuild build;
  build.manifest = out / "manifest.jsonl";
  for (const auto& subject : subjects) {
    for (const auto& cat : spec.categories) {
      const auto cell = subject + "/" + cat.action;
      PoseCellOverride o;
      if (auto it = spec.overrides.find({subject, cat.action}); it != spec.overrides.end()) o = it->second;
      if (o.exclude) {
        build.warnings.push_back("skipped " + cell + ": excluded by annotation");
        continue;
      }
      auto clip = load_clip(corpus, subject, cat.action);
      if (!clip || clip->empty()) {
        build.warnings.push_back("skipped " + cell + ": no clip in corpus");
        continue;
      }
      const int n = static_cast<int>(clip->size());
      const int src = o.source_index.value_or(1);
      const int peak = o.peak_index.value_or(cat.peak_index);
      for (auto [name, idx] : {std::pair{"source", src}, std::pair{"peak", peak}})
        if (idx < 1 || idx > n)
          throw InvalidArgument(cell + ": " + name + " index " + std::to_string(idx) + " outside clip of " +
                                std::to_string(n) + " frames");

      EditTask t;
      t.id = subject + "-" + cat.action;
      validate_job_id(t.id);
      t.target_caption = cat.prompt;
      t.category = cat.action;
      t.source_description = spec.source_description;
      t.annotation = FrameAnnotation{src, peak};
      t.source_image = (*clip)[static_cast<std::size_t>(src - 1)];
      t.gt_target_image = (*clip)[static_cast<std::size_t>(peak - 1)];
      if (!cat.temporal_caption.empty())
        t.temporal_caption = TemporalCaption{cat.temporal_caption, "posedit-spec", "", {}};
      const auto img_dir = out / "images" / t.id;
      t.source_path = img_dir / "source.png";
      t.gt_target_path = img_dir / "target.png";
      write_png(t.source_image, t.source_path);
      write_png(*t.gt_target_image, *t.gt_target_path);
      build.tasks.push_back(std::move(t));
    }
  }
  for (const auto& w : build.warnings) std::clog << "warning: " << w << '\n';
  write_manifest(build.manifest, build.tasks);
  return build;
}

}  // namespace f2f
