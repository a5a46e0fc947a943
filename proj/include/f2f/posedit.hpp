// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "f2f/types.hpp"

namespace f2f {

inline constexpr const char* kNeutralPoseDescription =
    "A person standing naturally with his arms relaxed at his sides.";

struct PoseCategory {
  std::string action;            // clip directory name under each subject
  std::string prompt;            // target caption
  std::string temporal_caption;
  int peak_index = 1;            // default 1-based gt frame
};

struct PoseCellOverride {
  std::optional<int> source_index;
  std::optional<int> peak_index;
  bool exclude = false;
};

/// Category table plus per-(subject, action) annotations.
///
/// JSON form:
///   {"source_description": "...",
///    "categories": [{"action", "prompt", "temporal_caption", "peak_index"}],
///    "records": [{"subject", "action", "source_index"?, "peak_index"?, "exclude"?}]}
struct PoseEditSpec {
  std::string source_description = kNeutralPoseDescription;
  std::vector<PoseCategory> categories;
  std::map<std::pair<std::string, std::string>, PoseCellOverride> overrides;

  static PoseEditSpec load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  void validate() const;
};

struct PoseEditBuild {
  std::filesystem::path manifest;
  std::vector<EditTask> tasks;
  std::vector<std::string> warnings;  // one per skipped cell
};

// Corpus layout: <corpus>/<subject>/<action>/ holding either numbered image
// frames (sorted by name) or one video file, or <corpus>/<subject>/<action>.<ext>.
// Writes <out>/images/<id>/{source,target}.png and <out>/manifest.jsonl.
// Missing or excluded cells are skipped with a warning; an annotation index
// outside the clip is an InvalidArgument naming the cell.
PoseEditBuild build_posedit(const std::filesystem::path& corpus, const PoseEditSpec& spec,
                            const std::filesystem::path& out);

// Frames of one clip; nullopt when the cell has no clip.
std::optional<std::vector<Image>> load_clip(const std::filesystem::path& corpus, const std::string& subject,
                                            const std::string& action);

}  // namespace f2f
