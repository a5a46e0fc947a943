// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "f2f/image.hpp"
#include "f2f/records.hpp"

namespace f2f {

enum class Role { system, user, assistant };
std::string_view to_string(Role r);

/// Encoded raster plus its MIME type.
struct ImagePart {
  std::string bytes;
  std::string mime = "image/png";
  friend bool operator==(const ImagePart&, const ImagePart&) = default;
};

struct VlmPart {
  std::variant<std::string, ImagePart> content;

  static VlmPart text(std::string t) { return {std::move(t)}; }
  static VlmPart image(const Image& img);
  bool is_text() const { return std::holds_alternative<std::string>(content); }
  friend bool operator==(const VlmPart&, const VlmPart&) = default;
};

struct VlmMessage {
  Role role = Role::user;
  std::vector<VlmPart> parts;

  void validate() const;
  std::string joined_text() const;
  friend bool operator==(const VlmMessage&, const VlmMessage&) = default;
};

struct VlmConfig {
  std::string endpoint = "https://api.openai.com/v1";
  std::string model_id = "gpt-4o";
  double temperature = 0.0;
  int max_output_tokens = 300;
  std::chrono::milliseconds timeout{60000};
  int retries = 3;
  std::chrono::milliseconds backoff_initial{500};
  std::chrono::milliseconds backoff_max{8000};
  std::string api_key_env = "F2F_VLM_API_KEY";
  int max_concurrency = 4;

  void validate() const;
};

/// Provider-specific transport. Implementations throw RetryableError or
/// FatalError (with the HTTP status when there is one).
class VlmAdapter {
 public:
  virtual ~VlmAdapter() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(std::span<const VlmMessage> messages, const VlmConfig& config) = 0;
};

/// OpenAI-compatible chat-completions over HTTP(S).
class OpenAiChatAdapter : public VlmAdapter {
 public:
  std::string id() const override { return "openai-chat"; }
  std::string complete(std::span<const VlmMessage> messages, const VlmConfig& config) override;

  static Json request_body(std::span<const VlmMessage> messages, const VlmConfig& config);
};

/// Replays a fixed sequence of replies or failures; falls back to
/// `responder` (if set) once the script runs out. Records every request.
class ScriptedVlm : public VlmAdapter {
 public:
  struct Step {
    std::string reply;
    int fail_status = 0;  // non-zero: fail this call with the given HTTP status
  };
  using Responder = std::function<std::string(std::span<const VlmMessage>)>;

  ScriptedVlm() = default;
  explicit ScriptedVlm(std::vector<Step> script, Responder responder = {});
  static std::shared_ptr<ScriptedVlm> replies(std::vector<std::string> texts);

  std::string id() const override { return "scripted"; }
  std::string complete(std::span<const VlmMessage> messages, const VlmConfig& config) override;

  void push(Step step);
  std::size_t calls() const;
  std::vector<std::vector<VlmMessage>> requests() const;

 private:
  mutable std::mutex mu_;
  std::deque<Step> script_;
  Responder responder_;
  std::vector<std::vector<VlmMessage>> requests_;
};

// Deterministic stand-in used by `--vlm stub`: answers frame-selection
// prompts with `selection` and caption prompts with a one-sentence slow
// transition toward the target caption.
ScriptedVlm::Responder rule_based_responder(int selection = 7);

/// Receives one structured entry per chat call (request, reply, attempts).
using TranscriptSink = std::function<void(const Json&)>;

struct ChatReply {
  std::string text;
  int attempts = 1;
};

/// Retrying, concurrency-bounded front door to an adapter.
class VlmGateway {
 public:
  VlmGateway(std::shared_ptr<VlmAdapter> adapter, VlmConfig config);

  const VlmConfig& config() const { return config_; }
  std::string adapter_id() const { return adapter_->id(); }

  // Empty replies and retryable failures are retried with exponential
  // backoff up to config.retries times; then RetriesExhausted.
  std::string chat(std::span<const VlmMessage> messages, const TranscriptSink& sink = {});
  ChatReply chat_detailed(std::span<const VlmMessage> messages, const TranscriptSink& sink = {});

 private:
  std::shared_ptr<VlmAdapter> adapter_;
  VlmConfig config_;
  std::counting_semaphore<256> slots_;
};

// Request summary for transcripts: text verbatim, images as digest + size.
Json describe_messages(std::span<const VlmMessage> messages);

}  // namespace f2f
