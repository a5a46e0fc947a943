// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "f2f/error.hpp"
#include "f2f/types.hpp"

namespace f2f {

inline constexpr int kManifestSchemaVersion = 1;

/// A record referenced an image that could not be read.
class ManifestRecordError : public Error {
 public:
  ManifestRecordError(std::string task_id, const std::string& what)
      : Error("task " + task_id + ": " + what), task_id_(std::move(task_id)) {}
  const std::string& task_id() const noexcept { return task_id_; }

 private:
  std::string task_id_;
};

struct ManifestOptions {
  // Benchmark manifests reject gt/source aspect mismatches; ad-hoc ones only warn.
  bool strict_aspect = true;
};

// Reads a line-delimited manifest (first line may be the schema header).
// Relative image paths resolve against the manifest's directory.
std::vector<EditTask> load_manifest(const std::filesystem::path& path, ManifestOptions options = {});

// Writes the schema header followed by one record per task. Image paths under
// the manifest's directory are stored relative to it.
void write_manifest(const std::filesystem::path& path, std::span<const EditTask> tasks);

}  // namespace f2f
