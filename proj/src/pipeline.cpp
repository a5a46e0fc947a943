// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <mutex>

#include "f2f/error.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"

namespace f2f {

namespace fs = std::filesystem;

namespace {
constexpr std::pair<JobState, std::string_view> kStates[] = {
    {JobState::queued, "queued"},       {JobState::captioning, "captioning"}, {JobState::generating, "generating"},
    {JobState::selecting, "selecting"}, {JobState::done, "done"},             {JobState::failed, "failed"}};
}  // namespace

std::string_view to_string(JobState s) {
  for (const auto& [k, v] : kStates)
    if (k == s) return v;
  return "failed";
}

JobState parse_job_state(std::string_view s) {
  for (const auto& [k, v] : kStates)
    if (v == s) return k;
  throw ParseError("unknown job state '" + std::string(s) + "'", 0);
}

int state_rank(JobState s) {
  switch (s) {
    case JobState::queued: return 0;
    case JobState::captioning: return 1;
    case JobState::generating: return 2;
    case JobState::selecting: return 3;
    case JobState::done: return 4;
    case JobState::failed: return 5;
  }
  return 5;
}

SelectSpec SelectSpec::parse(std::string_view text) {
  if (text == "auto") return {SelectionMethod::automatic, 0};
  if (text == "last") return {SelectionMethod::last, 0};
  if (text.starts_with("frame:")) {
    const auto num = text.substr(6);
    int k = -1;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
    if (ec == std::errc() && ptr == num.data() + num.size() && k >= 0) return {SelectionMethod::manual, k};
  }
  throw InvalidArgument("selection must be auto, last or frame:K, got '" + std::string(text) + "'");
}

std::string SelectSpec::str() const {
  switch (method) {
    case SelectionMethod::automatic: return "auto";
    case SelectionMethod::last: return "last";
    case SelectionMethod::manual: return "frame:" + std::to_string(frame);
  }
  return "auto";
}

void to_json(Json& j, const JobRecord& r) {
  j = Json{{"job_id", r.job_id},   {"task_id", r.task_id},         {"prompt", r.prompt},
           {"backend_id", r.backend_id}, {"seed", r.seed},         {"select", r.select},
           {"raw_caption", r.raw_caption}, {"state", to_string(r.state)}, {"cache_hit", r.cache_hit},
           {"params", r.params}, {"transitions", Json::array()}};
  for (const auto& [s, t] : r.transitions) j["transitions"].push_back({{"state", to_string(s)}, {"at", format_timestamp(t)}});
  if (r.error) j["error"] = *r.error;
  if (r.frame_count) j["frame_count"] = *r.frame_count;
  if (r.cache_key) j["cache_key"] = *r.cache_key;
}

void from_json(const Json& j, JobRecord& r) {
  r.job_id = j.at("job_id").get<std::string>();
  r.task_id = j.value("task_id", r.job_id);
  r.prompt = j.value("prompt", "");
  r.backend_id = j.value("backend_id", "");
  r.seed = j.value("seed", std::int64_t{0});
  r.select = j.value("select", "auto");
  r.raw_caption = j.value("raw_caption", false);
  r.state = parse_job_state(j.at("state").get<std::string>());
  r.cache_hit = j.value("cache_hit", false);
  if (j.contains("params")) r.params = j["params"].get<GenerationParams>();
  r.transitions.clear();
  if (j.contains("transitions"))
    for (const auto& t : j["transitions"])
      r.transitions.emplace_back(parse_job_state(t.at("state").get<std::string>()),
                                 parse_timestamp(t.at("at").get<std::string>()));
  r.error.reset();
  r.frame_count.reset();
  r.cache_key.reset();
  if (j.contains("error")) r.error = j["error"].get<std::string>();
  if (j.contains("frame_count")) r.frame_count = j["frame_count"].get<int>();
  if (j.contains("cache_key")) r.cache_key = j["cache_key"].get<std::string>();
}

void save_job_record(JobStore& store, JobRecord& record, std::optional<JobState> transition) {
  if (transition) {
    record.state = *transition;
    record.transitions.emplace_back(*transition, std::chrono::system_clock::now());
  }
  store.put(record.job_id, "job.rec", Json(record).dump(2) + "\n");
}

JobRecord load_job_record(const JobStore& store, std::string_view job_id) {
  const auto text = store.get(job_id, "job.rec");
  if (!text) throw NotFound("job " + std::string(job_id) + " not found");
  try {
    return Json::parse(*text).get<JobRecord>();
  } catch (const Json::exception& e) {
    throw IntegrityError("job " + std::string(job_id) + " has a corrupt job.rec: " + e.what());
  }
}

std::string video_frame_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "video/f_%03d.png", t);
  return buf;
}

std::string derive_job_id(const EditTask& task, const EditOptions& o, std::string_view backend_id) {
  CanonicalWriter w("f2f.job.v1");
  w.field("source", pixel_digest(task.source_image))
      .field("prompt", task.target_caption)
      .field("backend", backend_id)
      .field("seed", o.seed)
      .field("select", o.select.str())
      .field("raw_caption", std::int64_t{o.raw_caption ? 1 : 0})
      .field("caption_override", o.caption_override.value_or(""));
  auto id = task.id.empty() ? std::string("edit") : task.id;
  if (id.size() > 100) id.resize(100);
  return id + "-" + w.digest().substr(0, 12);
}

namespace {

std::mutex& job_mutex(std::string_view job_id) {
  static std::mutex registry_mu;
  static std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> registry;
  std::lock_guard lock(registry_mu);
  auto it = registry.find(job_id);
  if (it == registry.end()) it = registry.emplace(std::string(job_id), std::make_unique<std::mutex>()).first;
  return *it->second;
}

Image result_for(const JobStore& store, std::string_view job_id, int frame_index, const CanvasGeometry& g) {
  const auto name = frame_index == 0 ? std::string("canvas.png") : video_frame_name(frame_index);
  const auto bytes = store.get(job_id, name);
  if (!bytes) throw NotFound("job " + std::string(job_id) + " lacks " + name);
  return postprocess(decode_image(*bytes), g);
}

}  // namespace

EditPipeline::EditPipeline(JobStore& store, VideoEngine& engine, std::shared_ptr<VlmGateway> gateway,
                           PipelineConfig config)
    : store_(store), engine_(engine), gateway_(std::move(gateway)), config_(std::move(config)) {}

EditOutcome EditPipeline::run(const EditTask& task, VideoBackend& backend, const EditOptions& options,
                              const StageFn& on_stage) {
  if (task.source_image.empty()) throw InvalidArgument("task " + task.id + " has no source image");
  if (task.target_caption.empty()) throw InvalidArgument("task " + task.id + " has an empty prompt");

  EditOutcome out;
  out.job_id = options.job_id.empty() ? derive_job_id(task, options, backend.id()) : options.job_id;
  out.job_dir = store_.job_dir(out.job_id);

  JobRecord rec;
  bool fresh = true;
  if (store_.has(out.job_id, "job.rec")) {
    rec = load_job_record(store_, out.job_id);
    fresh = rec.state != JobState::queued;
  }
  if (fresh) {
    std::error_code ec;
    fs::remove_all(out.job_dir, ec);
    rec = JobRecord{};
  }
  rec.job_id = out.job_id;
  rec.task_id = task.id;
  rec.prompt = task.target_caption;
  rec.backend_id = backend.id();
  rec.seed = options.seed;
  rec.select = options.select.str();
  rec.raw_caption = options.raw_caption;
  rec.params = config_.params;

  auto stage = [&](JobState s) {
    save_job_record(store_, rec, s);
    if (on_stage) on_stage(s);
  };
  const TranscriptSink sink = [this, &out](const Json& entry) {
    store_.append_line(out.job_id, "vlm_log.jsonl", entry.dump());
  };
  auto need_gateway = [&]() -> VlmGateway& {
    if (!gateway_) throw InvalidArgument("this edit needs a VLM but none is configured");
    return *gateway_;
  };

  try {
    if (rec.transitions.empty()) stage(JobState::queued);
    store_.put(out.job_id, "source.png", encode_png(task.source_image));

    stage(JobState::captioning);
    if (options.caption_override) {
      out.caption = TemporalCaption{*options.caption_override, "user", "", std::chrono::system_clock::now()};
    } else if (options.raw_caption) {
      out.caption = raw_temporal_caption(task);
    } else if (task.temporal_caption) {
      out.caption = *task.temporal_caption;
    } else {
      out.caption = generate_temporal_caption(task, need_gateway(), config_.caption, sink);
    }
    out.caption.validate();
    store_.put(out.job_id, "caption.txt", out.caption.text + "\n");
    store_.put(out.job_id, "caption.rec", Json(out.caption).dump(2) + "\n");

    stage(JobState::generating);
    const auto canvas = preprocess(task.source_image, config_.geometry);
    if (canvas.warning) out.warnings.push_back(*canvas.warning);
    store_.put(out.job_id, "canvas.png", encode_png(canvas.image));
    const auto gen = engine_.generate(backend, canvas, out.caption, options.seed, config_.params);
    const auto& video = gen.video;
    out.frame_count = video.frame_count();
    out.cache_key = gen.cache_key;
    out.cache_hit = gen.cache_hit;
    for (int t = 1; t <= video.frame_count(); ++t) {
      const auto cached = gen.cache_dir / fs::path(video_frame_name(t)).filename();
      if (fs::is_regular_file(cached))
        store_.link(out.job_id, video_frame_name(t), cached);
      else
        store_.put(out.job_id, video_frame_name(t), encode_png(video.frame(t)));
    }
    rec.frame_count = out.frame_count;
    rec.cache_key = out.cache_key;
    rec.cache_hit = out.cache_hit;

    stage(JobState::selecting);
    FrameSelection sel;
    switch (options.select.method) {
      case SelectionMethod::automatic: {
        const auto collage = build_collage(task.source_image, sample_frames(video, config_.stride));
        store_.put(out.job_id, "collage.png", encode_png(collage.image));
        sel = select_frame_auto(collage, task, video.frame_count(), need_gateway(), config_.selection, sink);
        sel.collage_ref = "collage.png";
        if (sel.warning) out.warnings.push_back(*sel.warning);
        break;
      }
      case SelectionMethod::last:
        sel = select_last(video);
        break;
      case SelectionMethod::manual:
        sel = select_manual(options.select.frame, video.frame_count());
        break;
    }
    sel.validate(video.frame_count());
    {
      std::lock_guard lock(job_mutex(out.job_id));
      // A manual override posted while the VLM was deciding wins.
      if (const auto prev = store_.get(out.job_id, "selection.rec")) {
        const auto p = Json::parse(*prev).get<FrameSelection>();
        if (p.method == SelectionMethod::manual && options.select.method != SelectionMethod::manual) sel = p;
      }
      out.selection = sel;
      out.result = sel.frame_index == 0 ? postprocess(canvas.image, config_.geometry)
                                        : postprocess(video.frame(sel.frame_index), config_.geometry);
      store_.put(out.job_id, "selection.rec", Json(sel).dump(2) + "\n");
      store_.put(out.job_id, "result.png", encode_png(out.result));
      stage(JobState::done);
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    try {
      save_job_record(store_, rec, JobState::failed);
    } catch (...) {
    }
    if (on_stage) on_stage(JobState::failed);
    throw;
  }
  return out;
}

FrameSelection EditPipeline::reselect(std::string_view job_id, int frame_index) {
  std::lock_guard lock(job_mutex(job_id));
  auto rec = load_job_record(store_, job_id);
  if (rec.state != JobState::selecting && rec.state != JobState::done)
    throw StateConflict("job " + std::string(job_id) + " is " + std::string(to_string(rec.state)) +
                          ", selection needs selecting or done");
  const int t = rec.frame_count.value_or(0);
  auto sel = select_manual(frame_index, t);
  if (const auto prev = store_.get(job_id, "selection.rec")) {
    const auto p = Json::parse(*prev).get<FrameSelection>();
    sel.collage_ref = p.collage_ref;
    sel.collage_digest = p.collage_digest;
  }
  const auto result = result_for(store_, job_id, frame_index, config_.geometry);
  store_.put(job_id, "selection.rec", Json(sel).dump(2) + "\n");
  store_.put(job_id, "result.png", encode_png(result));
  save_job_record(store_, rec);
  return sel;
}

}  // namespace f2f
