// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "f2f/image.hpp"
#include "f2f/metrics.hpp"
#include "f2f/types.hpp"

namespace f2f {

// 15 seeds by default; some experiments used 9.
std::vector<std::int64_t> default_seeds(int count = 15);

struct ProtocolConfig {
  std::vector<std::int64_t> seeds = default_seeds();
  SelectionMethod selection_mode = SelectionMethod::automatic;
  int resolution = 512;
  std::string arm = "temporal/auto";
  // Records, result images and reports go to <run_dir>; empty disables persistence.
  std::filesystem::path run_dir;
  int workers = 1;

  void validate() const;
};

// (task, seed) -> edited image at config.resolution.
using EditFn = std::function<Image(const EditTask&, std::int64_t)>;

struct SummaryRow {
  std::string label;
  std::size_t count = 0;
  double src_lpips = 0.0;
  double src_clip_i = 0.0;
  double tgt_clip = 0.0;
  std::optional<double> tgt_lpips;
  std::optional<double> tgt_clip_i;
};

struct ProtocolResult {
  std::vector<EvalRecord> records;            // sorted by (task_id, seed)
  std::map<std::string, std::size_t> best;    // task_id -> index into records
  SummaryRow summary;                         // means over the best records
  std::size_t failures = 0;                   // records carrying an error
  std::size_t executed = 0;                   // pipeline invocations this run
  std::size_t reused = 0;                     // records loaded from run_dir
  std::optional<SummaryRow> gt_reference;     // gt evaluated as the edit, if any task has gt
};

// Highest tgt_clip, then lowest src_lpips, then lowest seed. Errored records never win.
std::map<std::string, std::size_t> choose_best(const std::vector<EvalRecord>& records);

// Column means over records[best[*]] in task-id order.
SummaryRow summarize(const std::string& label, const std::vector<EvalRecord>& records,
                     const std::map<std::string, std::size_t>& best);

// Evaluates each task's own gt as the edited image; nullopt if no task has gt.
std::optional<SummaryRow> gt_reference_row(std::span<const EditTask> tasks, MetricProviders& providers,
                                           int resolution = 512);

// Runs every (task, seed) cell. With a run_dir, completed cells from an earlier
// run are loaded from records.jsonl and not executed again.
ProtocolResult run_protocol(std::span<const EditTask> tasks, const EditFn& pipeline, const ProtocolConfig& config,
                            MetricProviders& providers);

std::vector<EvalRecord> load_records(const std::filesystem::path& records_jsonl);

// Tab-separated table; target columns appear when any row has them.
std::string format_summary_tsv(std::span<const SummaryRow> rows);
std::string format_summary_text(std::span<const SummaryRow> rows);
// One row per record with the automatic best flag and an empty human_pick column.
std::string format_review_sheet(const ProtocolResult& result, const std::filesystem::path& results_dir = {});

// Directory-safe form of an arm label ("temporal/auto" -> "temporal-auto").
std::string arm_slug(std::string_view arm);

}  // namespace f2f
