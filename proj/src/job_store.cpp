// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/job_store.hpp"

#include <algorithm>
#include <cctype>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"

namespace f2f {

namespace fs = std::filesystem;

std::string cache_key(std::string_view source_digest, std::string_view caption_text,
                      const GenerationParams& params, std::int64_t seed) {
  return CanonicalWriter("f2f.cache.v1")
      .field("source_digest", source_digest)
      .field("caption", caption_text)
      .field("guidance_scale", params.guidance_scale)
      .field("num_frames", std::int64_t{params.num_frames})
      .field("num_inference_steps", std::int64_t{params.num_inference_steps})
      .field("fps", std::int64_t{params.fps})
      .field("seed", seed)
      .digest();
}

void validate_job_id(std::string_view id) {
  const bool chars_ok = std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
  if (id.empty() || id.size() > 128 || !chars_ok || id == "." || id == ".." || id.front() == '.')
    throw InvalidArgument("invalid job id '" + std::string(id) + "'");
}

void validate_artifact_name(std::string_view name) {
  const fs::path p{std::string(name)};
  if (name.empty() || p.is_absolute() || name.find("//") != std::string_view::npos || name.back() == '/')
    throw InvalidArgument("invalid artifact name '" + std::string(name) + "'");
  for (const auto& part : p)
    if (part == ".." || part == "." || part.string().starts_with("."))
      throw InvalidArgument("invalid artifact name '" + std::string(name) + "'");
}

JobStore::JobStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(jobs_dir(), ec);
  if (ec) throw IoError("cannot create job store (" + ec.message() + ")", jobs_dir());
}

fs::path JobStore::job_dir(std::string_view job_id) const {
  validate_job_id(job_id);
  return jobs_dir() / std::string(job_id);
}

bool JobStore::exists(std::string_view job_id) const { return fs::is_directory(job_dir(job_id)); }

std::vector<std::string> JobStore::list() const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(jobs_dir())) {
    auto name = e.path().filename().string();
    if (e.is_directory() && !name.starts_with(".")) ids.push_back(std::move(name));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void JobStore::store_job(std::string_view job_id, const JobArtifacts& artifacts) {
  const auto target = job_dir(job_id);
  const auto staged = staging_path(target);
  std::error_code ec;
  fs::create_directories(staged, ec);
  if (ec) throw IoError("cannot create staging directory (" + ec.message() + ")", staged);
  try {
    for (const auto& [name, bytes] : artifacts.files) {
      validate_artifact_name(name);
      write_file_atomic(staged / name, bytes);
    }
  } catch (...) {
    fs::remove_all(staged, ec);
    throw;
  }

  fs::rename(staged, target, ec);
  if (!ec) return;
  // Target exists: swap it out, then publish.
  const auto retired = staging_path(target);
  fs::rename(target, retired, ec);
  if (ec) {
    fs::remove_all(staged, ec);
    throw IoError("cannot replace job directory", target);
  }
  fs::rename(staged, target, ec);
  if (ec) {
    fs::rename(retired, target, ec);
    throw IoError("cannot publish job directory", target);
  }
  fs::remove_all(retired, ec);
}

JobArtifacts JobStore::load_job(std::string_view job_id) const {
  const auto dir = job_dir(job_id);
  if (!fs::is_directory(dir)) throw NotFound("unknown job '" + std::string(job_id) + "'");
  JobArtifacts out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = e.path().lexically_relative(dir);
    bool hidden = false;
    for (const auto& part : rel) hidden = hidden || part.string().starts_with(".");
    if (hidden) continue;
    out.files.emplace(rel.generic_string(), read_file(e.path()));
  }
  return out;
}

void JobStore::put(std::string_view job_id, std::string_view name, std::string_view bytes) {
  validate_artifact_name(name);
  write_file_atomic(job_dir(job_id) / std::string(name), bytes);
}

std::optional<std::string> JobStore::get(std::string_view job_id, std::string_view name) const {
  validate_artifact_name(name);
  const auto p = job_dir(job_id) / std::string(name);
  if (!fs::is_regular_file(p)) return std::nullopt;
  return read_file(p);
}

bool JobStore::has(std::string_view job_id, std::string_view name) const {
  validate_artifact_name(name);
  return fs::is_regular_file(job_dir(job_id) / std::string(name));
}

void JobStore::append_line(std::string_view job_id, std::string_view name, std::string_view line) {
  validate_artifact_name(name);
  f2f::append_line(job_dir(job_id) / std::string(name), line);
}

void JobStore::link(std::string_view job_id, std::string_view name, const fs::path& existing) {
  validate_artifact_name(name);
  const auto target = job_dir(job_id) / std::string(name);
  fs::create_directories(target.parent_path());
  const auto staged = staging_path(target);
  std::error_code ec;
  fs::create_hard_link(existing, staged, ec);
  if (ec) {
    fs::copy_file(existing, staged, fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot link artifact (" + ec.message() + ")", target);
  }
  fs::rename(staged, target, ec);
  if (ec) {
    fs::remove(staged, ec);
    throw IoError("cannot publish artifact", target);
  }
}

}  // namespace f2f
