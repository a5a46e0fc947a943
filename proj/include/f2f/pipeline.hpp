// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "f2f/caption.hpp"
#include "f2f/job_store.hpp"
#include "f2f/records.hpp"
#include "f2f/selector.hpp"
#include "f2f/types.hpp"
#include "f2f/video.hpp"
#include "f2f/vlm.hpp"

namespace f2f {

enum class JobState { queued, captioning, generating, selecting, done, failed };
std::string_view to_string(JobState s);
JobState parse_job_state(std::string_view s);
// Position in queued < captioning < generating < selecting < done; failed is terminal.
int state_rank(JobState s);

/// "auto", "last" or "frame:K" (K = 0 keeps the source).
struct SelectSpec {
  SelectionMethod method = SelectionMethod::automatic;
  int frame = 0;

  static SelectSpec parse(std::string_view text);
  std::string str() const;
};

struct PipelineConfig {
  CaptionConfig caption;
  GenerationParams params;
  CanvasGeometry geometry;
  int stride = kDefaultStride;
  SelectionConfig selection;
};

struct EditOptions {
  std::int64_t seed = 0;
  SelectSpec select;
  bool raw_caption = false;
  std::optional<std::string> caption_override;  // temporal caption text used verbatim
  std::string job_id;                           // empty: derived from task and options
};

/// Persisted job document (jobs/<id>/job.rec).
struct JobRecord {
  std::string job_id;
  std::string task_id;
  std::string prompt;
  std::string backend_id;
  std::int64_t seed = 0;
  std::string select = "auto";
  bool raw_caption = false;
  JobState state = JobState::queued;
  std::optional<std::string> error;
  std::vector<std::pair<JobState, Timestamp>> transitions;
  std::optional<int> frame_count;
  std::optional<std::string> cache_key;
  bool cache_hit = false;
  GenerationParams params;
};
void to_json(Json& j, const JobRecord& r);
void from_json(const Json& j, JobRecord& r);

void save_job_record(JobStore& store, JobRecord& record, std::optional<JobState> transition = std::nullopt);
JobRecord load_job_record(const JobStore& store, std::string_view job_id);

struct EditOutcome {
  std::string job_id;
  std::filesystem::path job_dir;
  TemporalCaption caption;
  FrameSelection selection;
  Image result;
  int frame_count = 0;
  std::string cache_key;
  bool cache_hit = false;
  std::vector<std::string> warnings;
};

using StageFn = std::function<void(JobState)>;

std::string derive_job_id(const EditTask& task, const EditOptions& options, std::string_view backend_id);
// 1-based frame file name inside video/ ("f_007.png").
std::string video_frame_name(int t);

/// caption -> generate -> select -> postprocess, writing the job layout:
///   source.png canvas.png caption.txt caption.rec video/f_NNN.png
///   collage.png selection.rec result.png vlm_log.jsonl job.rec
class EditPipeline {
 public:
  // `gateway` may be null when no step needs the VLM.
  EditPipeline(JobStore& store, VideoEngine& engine, std::shared_ptr<VlmGateway> gateway, PipelineConfig config = {});

  const PipelineConfig& config() const { return config_; }
  JobStore& store() { return store_; }

  // Marks the job failed and rethrows on error.
  EditOutcome run(const EditTask& task, VideoBackend& backend, const EditOptions& options, const StageFn& on_stage = {});

  // Manual override on a job in selecting or done; 0 restores the postprocessed source.
  FrameSelection reselect(std::string_view job_id, int frame_index);

 private:
  JobStore& store_;
  VideoEngine& engine_;
  std::shared_ptr<VlmGateway> gateway_;
  PipelineConfig config_;
};

}  // namespace f2f
