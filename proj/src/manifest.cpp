// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/manifest.hpp"

#include <iostream>
#include <sstream>

#include "f2f/fs_util.hpp"
#include "f2f/image_io.hpp"
#include "f2f/records.hpp"
#include "f2f/text.hpp"

namespace f2f {

namespace fs = std::filesystem;

namespace {

Image load_task_image(const std::string& id, const fs::path& path) {
  if (!fs::exists(path)) throw ManifestRecordError(id, "missing image file " + path.string());
  try {
    return read_image(path);
  } catch (const Error& e) {
    throw ManifestRecordError(id, e.what());
  }
}

std::string optional_string(const Json& j, const char* key, std::size_t line) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line);
  return v.get<std::string>();
}

EditTask parse_record(const Json& j, const fs::path& base, std::size_t line, const ManifestOptions& options) {
  if (!j.is_object()) throw ParseError("record is not an object", line);
  for (const char* key : {"id", "source", "prompt"})
    if (!j.contains(key)) throw ParseError(std::string("record lacks required field '") + key + "'", line);

  EditTask t;
  t.id = optional_string(j, "id", line);
  t.target_caption = optional_string(j, "prompt", line);
  t.source_path = (base / optional_string(j, "source", line)).lexically_normal();
  t.source_image = load_task_image(t.id, t.source_path);
  if (j.contains("gt_target") && !j["gt_target"].is_null()) {
    t.gt_target_path = (base / optional_string(j, "gt_target", line)).lexically_normal();
    t.gt_target_image = load_task_image(t.id, *t.gt_target_path);
  }
  if (j.contains("temporal_caption") && !j["temporal_caption"].is_null()) {
    TemporalCaption c;
    c.text = optional_string(j, "temporal_caption", line);
    c.generator_id = "manifest";
    t.temporal_caption = c;
  }
  if (j.contains("category") && !j["category"].is_null()) t.category = optional_string(j, "category", line);
  if (j.contains("source_description") && !j["source_description"].is_null())
    t.source_description = optional_string(j, "source_description", line);
  if (j.contains("source_frame") || j.contains("peak_frame")) {
    FrameAnnotation a;
    a.source_index = j.value("source_frame", 1);
    a.peak_index = j.value("peak_frame", 1);
    t.annotation = a;
  }
  try {
    if (auto warning = t.validate(options.strict_aspect)) std::clog << "warning: " << *warning << '\n';
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), line);
  }
  return t;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  auto rel = fs::absolute(p).lexically_normal().lexically_relative(base);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

}  // namespace

std::vector<EditTask> load_manifest(const fs::path& path, ManifestOptions options) {
  const auto text = read_file(path);
  const auto base = fs::absolute(path).parent_path();
  std::vector<EditTask> tasks;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool header_allowed = true;
  while (std::getline(in, raw)) {
    ++line;
    const auto body = trim(raw);
    if (body.empty()) continue;
    Json j;
    try {
      j = Json::parse(body);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), line);
    }
    if (header_allowed && j.is_object() && j.contains("schema_version")) {
      header_allowed = false;
      const auto& v = j["schema_version"];
      if (!v.is_number_integer() || v.get<int>() > kManifestSchemaVersion)
        throw ParseError("unsupported manifest schema_version " + v.dump(), line);
      continue;
    }
    header_allowed = false;
    try {
      tasks.push_back(parse_record(j, base, line, options));
    } catch (const Json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what(), line);
    }
  }
  return tasks;
}

void write_manifest(const fs::path& path, std::span<const EditTask> tasks) {
  const auto base = fs::absolute(path).parent_path();
  std::string out = Json{{"schema_version", kManifestSchemaVersion}, {"kind", "f2f-manifest"}}.dump() + "\n";
  for (const auto& t : tasks) {
    Json j{{"id", t.id}, {"source", relative_to(t.source_path, base)}, {"prompt", t.target_caption}};
    if (t.gt_target_path) j["gt_target"] = relative_to(*t.gt_target_path, base);
    if (t.temporal_caption) j["temporal_caption"] = t.temporal_caption->text;
    if (t.category) j["category"] = *t.category;
    if (t.source_description) j["source_description"] = *t.source_description;
    if (t.annotation) {
      j["source_frame"] = t.annotation->source_index;
      j["peak_frame"] = t.annotation->peak_index;
    }
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace f2f
