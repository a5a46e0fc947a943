// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/config.hpp"

#include <charconv>
#include <set>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/text.hpp"

namespace f2f {

namespace fs = std::filesystem;

namespace {

const std::set<std::string, std::less<>> kFlatKeys{
    "store.root",           "cache.root",
    "vlm.adapter",          "vlm.endpoint",
    "vlm.model",            "vlm.temperature",
    "vlm.max_tokens",       "vlm.timeout_ms",
    "vlm.retries",          "vlm.backoff_ms",
    "vlm.max_concurrency",  "vlm.api_key_env",
    "vlm.stub_selection",   "caption.icl_bank",
    "caption.zero_shot",    "generation.guidance_scale",
    "generation.num_frames", "generation.num_inference_steps",
    "generation.fps",       "selection.stride",
    "selection.parse_retries", "backend.default",
    "service.host",         "service.port",
    "service.queue_size",   "service.workers",
    "service.cors_origin",  "metrics.providers",
    "metrics.endpoint",     "metrics.timeout_ms"};

const std::set<std::string, std::less<>> kBackendFields{
    "type", "endpoint", "model", "poll_interval_ms", "max_wait_s", "request_timeout_ms", "api_key_env",
    "max_frames", "first_frame_min_psnr"};

}  // namespace

void validate_config_key(std::string_view key) {
  if (key.ends_with("api_key") || key.find("secret") != std::string_view::npos || key.find("token.") == 0)
    throw InvalidArgument("config key '" + std::string(key) +
                          "' looks like a secret; put credentials in the environment variable named by *.api_key_env");
  if (kFlatKeys.contains(key)) return;
  if (key.starts_with("backend.")) {
    const auto parts = split(key, '.');
    if (parts.size() == 3 && !parts[1].empty() && kBackendFields.contains(parts[2])) return;
  }
  throw InvalidArgument("unknown config key '" + std::string(key) + "'");
}

Config Config::parse(std::string_view text, const std::string& source) {
  Config c;
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    auto line = std::string(trim(raw));
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source + ": expected key = value", lineno);
    const auto key = std::string(trim(std::string_view(line).substr(0, eq)));
    auto rest = std::string_view(line).substr(eq + 1);
    // Trailing comment: '#' preceded by whitespace.
    for (std::size_t i = 1; i < rest.size(); ++i)
      if (rest[i] == '#' && (rest[i - 1] == ' ' || rest[i - 1] == '\t')) {
        rest = rest.substr(0, i);
        break;
      }
    const auto value = std::string(trim(rest));
    try {
      validate_config_key(key);
    } catch (const InvalidArgument& e) {
      throw ParseError(source + ": " + e.what(), lineno);
    }
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const fs::path& path) { return parse(read_file(path), path.string()); }

std::optional<std::string> Config::get(std::string_view key) const {
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  return std::nullopt;
}

std::string Config::get_or(std::string_view key, std::string_view fallback) const {
  return get(key).value_or(std::string(fallback));
}

long long Config::get_int(std::string_view key, long long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  long long out = 0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size())
    throw InvalidArgument("config key " + std::string(key) + " expects an integer, got '" + *v + "'");
  return out;
}

double Config::get_double(std::string_view key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  double out = 0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size())
    throw InvalidArgument("config key " + std::string(key) + " expects a number, got '" + *v + "'");
  return out;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw InvalidArgument("config key " + std::string(key) + " expects true or false, got '" + *v + "'");
}

void Config::set(std::string_view key, std::string_view value) {
  validate_config_key(key);
  values_[std::string(key)] = std::string(value);
}

std::vector<std::string> Config::sections(std::string_view prefix) const {
  std::set<std::string> names;
  const auto lead = std::string(prefix) + ".";
  for (const auto& [k, v] : values_) {
    if (!k.starts_with(lead)) continue;
    const auto rest = std::string_view(k).substr(lead.size());
    const auto dot = rest.find('.');
    if (dot != std::string_view::npos) names.insert(std::string(rest.substr(0, dot)));
  }
  return {names.begin(), names.end()};
}

fs::path store_root(const Config& c) { return c.get_or("store.root", "f2f-data"); }

fs::path cache_root(const Config& c) {
  if (auto v = c.get("cache.root")) return *v;
  return store_root(c) / "cache";
}

VlmConfig vlm_config(const Config& c) {
  VlmConfig v;
  v.endpoint = c.get_or("vlm.endpoint", v.endpoint);
  v.model_id = c.get_or("vlm.model", v.model_id);
  v.temperature = c.get_double("vlm.temperature", v.temperature);
  v.max_output_tokens = static_cast<int>(c.get_int("vlm.max_tokens", v.max_output_tokens));
  v.timeout = std::chrono::milliseconds(c.get_int("vlm.timeout_ms", v.timeout.count()));
  v.retries = static_cast<int>(c.get_int("vlm.retries", v.retries));
  v.backoff_initial = std::chrono::milliseconds(c.get_int("vlm.backoff_ms", v.backoff_initial.count()));
  v.max_concurrency = static_cast<int>(c.get_int("vlm.max_concurrency", v.max_concurrency));
  v.api_key_env = c.get_or("vlm.api_key_env", v.api_key_env);
  v.validate();
  return v;
}

std::shared_ptr<VlmAdapter> make_vlm_adapter(const Config& c) {
  const auto kind = c.get_or("vlm.adapter", "openai");
  if (kind == "openai") return std::make_shared<OpenAiChatAdapter>();
  if (kind == "stub")
    return std::make_shared<ScriptedVlm>(std::vector<ScriptedVlm::Step>{},
                                         rule_based_responder(static_cast<int>(c.get_int("vlm.stub_selection", 7))));
  throw InvalidArgument("vlm.adapter must be openai or stub, got '" + kind + "'");
}

PipelineConfig pipeline_config(const Config& c) {
  PipelineConfig p;
  p.params.guidance_scale = c.get_double("generation.guidance_scale", p.params.guidance_scale);
  p.params.num_frames = static_cast<int>(c.get_int("generation.num_frames", p.params.num_frames));
  p.params.num_inference_steps = static_cast<int>(c.get_int("generation.num_inference_steps", p.params.num_inference_steps));
  p.params.fps = static_cast<int>(c.get_int("generation.fps", p.params.fps));
  p.stride = static_cast<int>(c.get_int("selection.stride", p.stride));
  p.selection.parse_retries = static_cast<int>(c.get_int("selection.parse_retries", p.selection.parse_retries));
  if (auto bank = c.get("caption.icl_bank")) p.caption.bank = load_icl_bank(*bank);
  p.caption.prompt.zero_shot = c.get_bool("caption.zero_shot", false);
  if (p.caption.prompt.zero_shot && !c.get("caption.icl_bank")) p.caption.bank.clear();
  return p;
}

BackendMap make_backends(const Config& c) {
  BackendMap out;
  auto names = c.sections("backend");
  if (std::find(names.begin(), names.end(), "mock") == names.end()) names.push_back("mock");
  for (const auto& name : names) {
    const auto key = [&](const char* field) { return "backend." + name + "." + field; };
    const auto type = c.get_or(key("type"), name == "mock" ? "mock" : "remote");
    if (type == "mock") {
      BackendCapabilities caps{120, 720, 480, true};
      caps.max_frames = static_cast<int>(c.get_int(key("max_frames"), caps.max_frames));
      out[name] = std::make_shared<MockBackend>(name, std::nullopt, caps);
    } else if (type == "remote") {
      RemoteBackendConfig r;
      r.id = name;
      r.endpoint = c.get_or(key("endpoint"), "");
      r.model = c.get_or(key("model"), "");
      r.poll_interval = std::chrono::milliseconds(c.get_int(key("poll_interval_ms"), r.poll_interval.count()));
      r.max_wait = std::chrono::seconds(c.get_int(key("max_wait_s"), 900));
      r.request_timeout = std::chrono::milliseconds(c.get_int(key("request_timeout_ms"), r.request_timeout.count()));
      r.api_key_env = c.get_or(key("api_key_env"), r.api_key_env);
      r.capabilities.max_frames = static_cast<int>(c.get_int(key("max_frames"), r.capabilities.max_frames));
      r.first_frame_min_psnr = c.get_double(key("first_frame_min_psnr"), r.first_frame_min_psnr);
      out[name] = std::make_shared<RemoteBackend>(r);
    } else if (type != "none") {
      throw InvalidArgument("backend " + name + " has unknown type '" + type + "'");
    }
  }
  return out;
}

std::string default_backend(const Config& c) { return c.get_or("backend.default", "mock"); }

std::unique_ptr<MetricProviders> make_providers(std::string_view name, const Config& c) {
  if (name == "stub") return std::make_unique<StubProviders>();
  if (name == "reference") {
    RemoteProvidersConfig r;
    r.endpoint = c.get_or("metrics.endpoint", r.endpoint);
    r.timeout = std::chrono::milliseconds(c.get_int("metrics.timeout_ms", r.timeout.count()));
    return std::make_unique<RemoteProviders>(r);
  }
  throw InvalidArgument("metric providers must be stub or reference, got '" + std::string(name) + "'");
}

}  // namespace f2f
