// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "f2f/metrics.hpp"
#include "f2f/pipeline.hpp"
#include "f2f/video.hpp"
#include "f2f/vlm.hpp"

namespace f2f {

/// `key = value` lines; '#' starts a comment, blank lines are ignored.
/// Keys are validated against the schema in docs/config.md. Secrets are not
/// accepted here: credentials are read from the environment variables named
/// by the *.api_key_env keys.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string_view fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  void set(std::string_view key, std::string_view value);

  // Distinct <name> in "<prefix>.<name>.<field>" keys, sorted.
  std::vector<std::string> sections(std::string_view prefix) const;
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

void validate_config_key(std::string_view key);

std::filesystem::path store_root(const Config& c);
std::filesystem::path cache_root(const Config& c);
VlmConfig vlm_config(const Config& c);
// "openai" (default) or "stub" (rule-based scripted replies, no network).
std::shared_ptr<VlmAdapter> make_vlm_adapter(const Config& c);
PipelineConfig pipeline_config(const Config& c);

using BackendMap = std::map<std::string, std::shared_ptr<VideoBackend>>;
// Configured backends; a "mock" backend is present unless backend.mock.type says otherwise.
BackendMap make_backends(const Config& c);
std::string default_backend(const Config& c);

// "stub" or "reference".
std::unique_ptr<MetricProviders> make_providers(std::string_view name, const Config& c);

}  // namespace f2f
