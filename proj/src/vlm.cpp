// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/vlm.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "f2f/error.hpp"
#include "f2f/hash.hpp"
#include "f2f/http_client.hpp"
#include "f2f/image_io.hpp"
#include "f2f/text.hpp"

namespace f2f {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
  }
  return "user";
}

VlmPart VlmPart::image(const Image& img) { return {ImagePart{encode_png(img), "image/png"}}; }

void VlmMessage::validate() const {
  if (parts.empty()) throw InvalidArgument("VLM message has no parts");
  for (const auto& p : parts)
    if (const auto* img = std::get_if<ImagePart>(&p.content); img && (img->bytes.empty() || img->mime.empty()))
      throw InvalidArgument("VLM image part lacks data or encoding");
}

std::string VlmMessage::joined_text() const {
  std::string out;
  for (const auto& p : parts)
    if (const auto* t = std::get_if<std::string>(&p.content)) {
      if (!out.empty()) out.push_back('\n');
      out += *t;
    }
  return out;
}

void VlmConfig::validate() const {
  if (temperature < 0) throw InvalidArgument("VLM temperature must be >= 0");
  if (retries < 0) throw InvalidArgument("VLM retries must be >= 0");
  if (max_concurrency < 1 || max_concurrency > 256) throw InvalidArgument("VLM max_concurrency must be in [1, 256]");
  if (max_output_tokens < 1) throw InvalidArgument("VLM max_output_tokens must be >= 1");
}

Json describe_messages(std::span<const VlmMessage> messages) {
  Json out = Json::array();
  for (const auto& m : messages) {
    Json parts = Json::array();
    for (const auto& p : m.parts) {
      if (const auto* t = std::get_if<std::string>(&p.content)) {
        parts.push_back({{"type", "text"}, {"text", *t}});
      } else {
        const auto& img = std::get<ImagePart>(p.content);
        parts.push_back({{"type", "image"}, {"mime", img.mime}, {"sha256", sha256_hex(img.bytes)},
                         {"bytes", img.bytes.size()}});
      }
    }
    out.push_back({{"role", std::string(to_string(m.role))}, {"parts", parts}});
  }
  return out;
}

// ---------------------------------------------------------------------------

Json OpenAiChatAdapter::request_body(std::span<const VlmMessage> messages, const VlmConfig& config) {
  Json msgs = Json::array();
  for (const auto& m : messages) {
    m.validate();
    Json content = Json::array();
    for (const auto& p : m.parts) {
      if (const auto* t = std::get_if<std::string>(&p.content)) {
        content.push_back({{"type", "text"}, {"text", *t}});
      } else {
        const auto& img = std::get<ImagePart>(p.content);
        content.push_back(
            {{"type", "image_url"},
             {"image_url", {{"url", "data:" + img.mime + ";base64," + base64_encode(img.bytes)}}}});
      }
    }
    if (m.role == Role::assistant) {
      msgs.push_back({{"role", "assistant"}, {"content", m.joined_text()}});
    } else {
      msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", content}});
    }
  }
  return Json{{"model", config.model_id},
              {"messages", msgs},
              {"temperature", config.temperature},
              {"max_tokens", config.max_output_tokens}};
}

std::string OpenAiChatAdapter::complete(std::span<const VlmMessage> messages, const VlmConfig& config) {
  http::Headers headers;
  if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  const auto res = http::post(http::join(config.endpoint, "chat/completions"),
                              request_body(messages, config).dump(), "application/json", headers, config.timeout);
  if (res.status != 200) {
    const auto msg = "VLM endpoint returned HTTP " + std::to_string(res.status);
    if (http::is_retryable_status(res.status)) throw RetryableError(msg, res.status);
    throw FatalError(msg, res.status);
  }
  try {
    const auto j = Json::parse(res.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_string() ? content.get<std::string>() : std::string();
  } catch (const Json::exception& e) {
    throw FatalError(std::string("malformed chat-completions response: ") + e.what(), res.status);
  }
}

// ---------------------------------------------------------------------------

ScriptedVlm::ScriptedVlm(std::vector<Step> script, Responder responder)
    : script_(script.begin(), script.end()), responder_(std::move(responder)) {}

std::shared_ptr<ScriptedVlm> ScriptedVlm::replies(std::vector<std::string> texts) {
  std::vector<Step> steps;
  for (auto& t : texts) steps.push_back({std::move(t), 0});
  return std::make_shared<ScriptedVlm>(std::move(steps));
}

std::string ScriptedVlm::complete(std::span<const VlmMessage> messages, const VlmConfig&) {
  std::unique_lock lock(mu_);
  requests_.emplace_back(messages.begin(), messages.end());
  if (script_.empty()) {
    if (!responder_) throw FatalError("scripted VLM has no reply left");
    auto responder = responder_;
    lock.unlock();
    return responder(messages);
  }
  auto step = script_.front();
  script_.pop_front();
  if (step.fail_status != 0) {
    const auto msg = "scripted VLM failure HTTP " + std::to_string(step.fail_status);
    if (http::is_retryable_status(step.fail_status)) throw RetryableError(msg, step.fail_status);
    throw FatalError(msg, step.fail_status);
  }
  return step.reply;
}

void ScriptedVlm::push(Step step) {
  std::lock_guard lock(mu_);
  script_.push_back(std::move(step));
}

std::size_t ScriptedVlm::calls() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

std::vector<std::vector<VlmMessage>> ScriptedVlm::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

ScriptedVlm::Responder rule_based_responder(int selection) {
  return [selection](std::span<const VlmMessage> messages) -> std::string {
    if (messages.empty()) return {};
    const auto text = messages.back().joined_text();
    if (text.find("The selected edit is:") != std::string::npos)
      return "The selected edit is:" + std::to_string(selection);

    // Caption request: the target caption is the first quoted span.
    std::string target = "the requested scene";
    const auto open = text.find('"');
    if (open != std::string::npos) {
      const auto close = text.find('"', open + 1);
      if (close != std::string::npos) target = text.substr(open + 1, close - open - 1);
    }
    std::string t(trim(target));
    while (!t.empty() && (t.back() == '.' || t.back() == '!' || t.back() == '?')) t.pop_back();
    if (!t.empty()) t[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(t[0])));
    return "The scene very slowly and smoothly transforms into " + t + ".";
  };
}

// ---------------------------------------------------------------------------

VlmGateway::VlmGateway(std::shared_ptr<VlmAdapter> adapter, VlmConfig config)
    : adapter_(std::move(adapter)), config_(std::move(config)), slots_(config_.max_concurrency) {
  if (!adapter_) throw InvalidArgument("VLM gateway needs an adapter");
  config_.validate();
}

std::string VlmGateway::chat(std::span<const VlmMessage> messages, const TranscriptSink& sink) {
  return chat_detailed(messages, sink).text;
}

ChatReply VlmGateway::chat_detailed(std::span<const VlmMessage> messages, const TranscriptSink& sink) {
  if (messages.empty()) throw InvalidArgument("chat needs at least one message");
  for (const auto& m : messages) m.validate();

  const char* key = std::getenv(config_.api_key_env.c_str());
  const std::string secret = key ? key : "";
  auto redact = [&](std::string s) { return secret.empty() ? s : replace_all(s, secret, "[REDACTED]"); };

  Json entry{{"adapter", adapter_->id()},
             {"model", config_.model_id},
             {"temperature", config_.temperature},
             {"request", describe_messages(messages)}};
  Json attempts_log = Json::array();

  auto backoff = config_.backoff_initial;
  int last_status = 0;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, config_.backoff_max);
    }
    try {
      slots_.acquire();
      std::string reply;
      try {
        reply = adapter_->complete(messages, config_);
      } catch (...) {
        slots_.release();
        throw;
      }
      slots_.release();
      if (trim(reply).empty()) throw RetryableError("VLM returned an empty reply", 200);
      attempts_log.push_back({{"status", "ok"}});
      entry["attempts"] = attempts_log;
      entry["retries"] = attempt;
      entry["reply"] = redact(reply);
      if (sink) sink(entry);
      return {reply, attempt + 1};
    } catch (const RetryableError& e) {
      last_status = e.status();
      last_error = e.what();
      attempts_log.push_back({{"status", "retryable"}, {"http_status", e.status()}, {"error", redact(e.what())}});
    } catch (const FatalError& e) {
      attempts_log.push_back({{"status", "fatal"}, {"http_status", e.status()}, {"error", redact(e.what())}});
      entry["attempts"] = attempts_log;
      if (sink) sink(entry);
      throw;
    }
  }
  entry["attempts"] = attempts_log;
  entry["retries"] = config_.retries;
  if (sink) sink(entry);
  throw RetriesExhausted("VLM retries exhausted after " + std::to_string(config_.retries + 1) +
                             " attempts; last error: " + redact(last_error),
                         last_status, config_.retries + 1);
}

}  // namespace f2f
