// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/records.hpp"

namespace f2f {

void to_json(Json& j, const GenerationParams& p) {
  j = Json{{"guidance_scale", p.guidance_scale},
           {"num_frames", p.num_frames},
           {"num_inference_steps", p.num_inference_steps},
           {"fps", p.fps}};
}

void from_json(const Json& j, GenerationParams& p) {
  GenerationParams d;
  p.guidance_scale = j.value("guidance_scale", d.guidance_scale);
  p.num_frames = j.value("num_frames", d.num_frames);
  p.num_inference_steps = j.value("num_inference_steps", d.num_inference_steps);
  p.fps = j.value("fps", d.fps);
}

void to_json(Json& j, const TemporalCaption& c) {
  j = Json{{"text", c.text},
           {"generator_id", c.generator_id},
           {"prompt_digest", c.prompt_digest},
           {"created_at", format_timestamp(c.created_at)}};
}

void from_json(const Json& j, TemporalCaption& c) {
  c.text = j.at("text").get<std::string>();
  c.generator_id = j.value("generator_id", "");
  c.prompt_digest = j.value("prompt_digest", "");
  c.created_at = j.contains("created_at") ? parse_timestamp(j.at("created_at").get<std::string>()) : Timestamp{};
}

void to_json(Json& j, const FrameSelection& s) {
  j = Json{{"method", std::string(to_string(s.method))}, {"frame_index", s.frame_index}, {"fallback", s.fallback}};
  j["identifier"] = s.identifier ? Json(*s.identifier) : Json(nullptr);
  j["raw_reply"] = s.vlm_reply ? Json(*s.vlm_reply) : Json(nullptr);
  j["collage_digest"] = s.collage_digest ? Json(*s.collage_digest) : Json(nullptr);
  if (s.collage_ref) j["collage_ref"] = s.collage_ref->generic_string();
  if (s.warning) j["warning"] = *s.warning;
}

void from_json(const Json& j, FrameSelection& s) {
  s.method = parse_selection_method(j.at("method").get<std::string>());
  s.frame_index = j.at("frame_index").get<int>();
  s.fallback = j.value("fallback", false);
  s.identifier.reset();
  s.vlm_reply.reset();
  s.collage_digest.reset();
  s.collage_ref.reset();
  s.warning.reset();
  if (j.contains("identifier") && !j["identifier"].is_null()) s.identifier = j["identifier"].get<int>();
  if (j.contains("raw_reply") && !j["raw_reply"].is_null()) s.vlm_reply = j["raw_reply"].get<std::string>();
  if (j.contains("collage_digest") && !j["collage_digest"].is_null())
    s.collage_digest = j["collage_digest"].get<std::string>();
  if (j.contains("collage_ref")) s.collage_ref = j["collage_ref"].get<std::string>();
  if (j.contains("warning")) s.warning = j["warning"].get<std::string>();
}

void to_json(Json& j, const EvalRecord& r) {
  j = Json{{"task_id", r.task_id},     {"seed", r.seed},         {"arm", r.arm},
           {"src_lpips", r.src_lpips}, {"src_clip_i", r.src_clip_i}, {"tgt_clip", r.tgt_clip}};
  if (r.tgt_lpips) j["tgt_lpips"] = *r.tgt_lpips;
  if (r.tgt_clip_i) j["tgt_clip_i"] = *r.tgt_clip_i;
  if (r.error) j["error"] = *r.error;
}

void from_json(const Json& j, EvalRecord& r) {
  r.task_id = j.at("task_id").get<std::string>();
  r.seed = j.at("seed").get<std::int64_t>();
  r.arm = j.value("arm", "");
  r.src_lpips = j.value("src_lpips", 0.0);
  r.src_clip_i = j.value("src_clip_i", 0.0);
  r.tgt_clip = j.value("tgt_clip", 0.0);
  r.tgt_lpips.reset();
  r.tgt_clip_i.reset();
  r.error.reset();
  if (j.contains("tgt_lpips")) r.tgt_lpips = j["tgt_lpips"].get<double>();
  if (j.contains("tgt_clip_i")) r.tgt_clip_i = j["tgt_clip_i"].get<double>();
  if (j.contains("error")) r.error = j["error"].get<std::string>();
}

}  // namespace f2f
