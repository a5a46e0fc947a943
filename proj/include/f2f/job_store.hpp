// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "f2f/types.hpp"

namespace f2f {

// Content-addressed key for a generated video: SHA-256 over the canonical
// serialization of (source digest, caption, generation params, seed).
// Pure; see docs/formats.md for the frozen byte layout.
std::string cache_key(std::string_view source_digest, std::string_view caption_text,
                      const GenerationParams& params, std::int64_t seed);

/// Files of one job keyed by path relative to the job directory
/// (e.g. "video/f_001.png").
struct JobArtifacts {
  std::map<std::string, std::string> files;
  friend bool operator==(const JobArtifacts&, const JobArtifacts&) = default;
};

/// Filesystem job store rooted at `<root>/jobs`. Whole jobs are published by
/// renaming a staged directory; single artifacts by renaming a staged file.
/// Readers therefore never see a partially written job or file.
class JobStore {
 public:
  explicit JobStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path jobs_dir() const { return root_ / "jobs"; }
  std::filesystem::path job_dir(std::string_view job_id) const;

  bool exists(std::string_view job_id) const;
  std::vector<std::string> list() const;

  // Publishes all artifacts at once, replacing any earlier version of the job.
  void store_job(std::string_view job_id, const JobArtifacts& artifacts);
  // Throws NotFound for an unknown id.
  JobArtifacts load_job(std::string_view job_id) const;

  void put(std::string_view job_id, std::string_view name, std::string_view bytes);
  std::optional<std::string> get(std::string_view job_id, std::string_view name) const;
  bool has(std::string_view job_id, std::string_view name) const;
  void append_line(std::string_view job_id, std::string_view name, std::string_view line);

  // Makes `name` inside the job refer to an existing file (hard link, copy fallback).
  void link(std::string_view job_id, std::string_view name, const std::filesystem::path& existing);

 private:
  std::filesystem::path root_;
};

// Throws InvalidArgument unless the id is 1..128 chars of [A-Za-z0-9._-] and not "." or "..".
void validate_job_id(std::string_view job_id);
void validate_artifact_name(std::string_view name);

}  // namespace f2f
