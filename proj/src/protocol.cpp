// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"
#include "f2f/job_store.hpp"
#include "f2f/records.hpp"

namespace f2f {

namespace fs = std::filesystem;

std::vector<std::int64_t> default_seeds(int count) {
  std::vector<std::int64_t> s(static_cast<std::size_t>(std::max(0, count)));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::int64_t>(i);
  return s;
}

void ProtocolConfig::validate() const {
  if (seeds.empty()) throw InvalidArgument("protocol needs at least one seed");
  if (std::set<std::int64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw InvalidArgument("protocol seeds must be distinct");
  if (selection_mode == SelectionMethod::manual) throw InvalidArgument("protocol selection must be auto or last");
  if (resolution < 1) throw InvalidArgument("resolution must be positive");
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  if (arm.empty()) throw InvalidArgument("arm label is empty");
}

std::string arm_slug(std::string_view arm) {
  std::string s(arm);
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '-';
  if (s.empty() || s.front() == '.') s.insert(s.begin(), 'x');
  return s;
}

std::map<std::string, std::size_t> choose_best(const std::vector<EvalRecord>& records) {
  std::map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.ok()) continue;
    auto it = best.find(r.task_id);
    if (it == best.end()) {
      best.emplace(r.task_id, i);
      continue;
    }
    const auto& b = records[it->second];
    const bool better = r.tgt_clip > b.tgt_clip ||
                        (r.tgt_clip == b.tgt_clip &&
                         (r.src_lpips < b.src_lpips || (r.src_lpips == b.src_lpips && r.seed < b.seed)));
    if (better) it->second = i;
  }
  return best;
}

SummaryRow summarize(const std::string& label, const std::vector<EvalRecord>& records,
                     const std::map<std::string, std::size_t>& best) {
  SummaryRow row;
  row.label = label;
  double tl = 0.0, ti = 0.0;
  std::size_t nt = 0;
  for (const auto& [task, idx] : best) {
    const auto& r = records.at(idx);
    row.src_lpips += r.src_lpips;
    row.src_clip_i += r.src_clip_i;
    row.tgt_clip += r.tgt_clip;
    if (r.tgt_lpips && r.tgt_clip_i) {
      tl += *r.tgt_lpips;
      ti += *r.tgt_clip_i;
      ++nt;
    }
    ++row.count;
  }
  if (row.count > 0) {
    const auto n = static_cast<double>(row.count);
    row.src_lpips /= n;
    row.src_clip_i /= n;
    row.tgt_clip /= n;
  }
  if (nt > 0) {
    row.tgt_lpips = tl / static_cast<double>(nt);
    row.tgt_clip_i = ti / static_cast<double>(nt);
  }
  return row;
}

std::optional<SummaryRow> gt_reference_row(std::span<const EditTask> tasks, MetricProviders& providers,
                                           int resolution) {
  std::vector<EvalRecord> records;
  for (const auto& t : tasks) {
    if (!t.gt_target_image) continue;
    auto r = evaluate_task(t, to_eval_resolution(*t.gt_target_image, resolution), providers, resolution);
    if (r.ok()) records.push_back(std::move(r));
  }
  if (records.empty()) return std::nullopt;
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.task_id < b.task_id; });
  return summarize("GT (reference)", records, choose_best(records));
}

std::vector<EvalRecord> load_records(const fs::path& records_jsonl) {
  std::vector<EvalRecord> out;
  std::ifstream in(records_jsonl);
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line).get<EvalRecord>());
    } catch (const Json::exception& e) {
      throw ParseError(records_jsonl.string() + ": " + e.what(), lineno);
    }
  }
  return out;
}

namespace {

using CellKey = std::pair<std::string, std::int64_t>;

bool record_less(const EvalRecord& a, const EvalRecord& b) {
  return std::tie(a.task_id, a.seed) < std::tie(b.task_id, b.seed);
}

fs::path result_path(const fs::path& run_dir, const std::string& task_id, std::int64_t seed) {
  return run_dir / "results" / task_id / ("s" + std::to_string(seed) + ".png");
}

}  // namespace

ProtocolResult run_protocol(std::span<const EditTask> tasks, const EditFn& pipeline, const ProtocolConfig& config,
                            MetricProviders& providers) {
  config.validate();
  if (!pipeline) throw InvalidArgument("protocol pipeline is empty");
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    validate_job_id(t.id);
    if (!ids.insert(t.id).second) throw InvalidArgument("duplicate task id " + t.id);
  }

  const bool persist = !config.run_dir.empty();
  const auto records_file = config.run_dir / "records.jsonl";

  // Later lines supersede earlier ones; errored cells are retried.
  std::map<CellKey, EvalRecord> done;
  if (persist) {
    fs::create_directories(config.run_dir);
    for (auto& r : load_records(records_file))
      if (r.arm == config.arm) done[{r.task_id, r.seed}] = std::move(r);
    std::erase_if(done, [](const auto& kv) { return !kv.second.ok(); });
  }

  std::vector<std::pair<const EditTask*, std::int64_t>> cells;
  for (const auto& t : tasks)
    for (auto seed : config.seeds)
      if (!done.contains({t.id, seed})) cells.emplace_back(&t, seed);

  ProtocolResult result;
  for (const auto& t : tasks)
    for (auto seed : config.seeds)
      if (auto it = done.find({t.id, seed}); it != done.end()) {
        result.records.push_back(it->second);
        ++result.reused;
      }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto& [task, seed] = cells[i];
      EvalRecord rec;
      try {
        const auto edited = pipeline(*task, seed);
        rec = evaluate_task(*task, edited, providers, config.resolution);
        if (persist) write_png(edited, result_path(config.run_dir, task->id, seed));
      } catch (const std::exception& e) {
        rec = EvalRecord{};
        rec.task_id = task->id;
        rec.error = std::string("pipeline failed: ") + e.what();
      }
      rec.task_id = task->id;
      rec.seed = seed;
      rec.arm = config.arm;
      if (persist) append_line(records_file, Json(rec).dump());
      std::lock_guard lock(mu);
      result.records.push_back(std::move(rec));
      ++result.executed;
    }
  };
  const auto nworkers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), cells.size());
  if (nworkers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < nworkers; ++w) pool.emplace_back(work);
  }

  std::sort(result.records.begin(), result.records.end(), record_less);
  for (const auto& r : result.records)
    if (!r.ok()) ++result.failures;
  result.best = choose_best(result.records);
  result.summary = summarize(config.arm, result.records, result.best);
  result.gt_reference = gt_reference_row(tasks, providers, config.resolution);

  if (persist) {
    std::vector<SummaryRow> rows{result.summary};
    if (result.gt_reference) rows.push_back(*result.gt_reference);
    write_file_atomic(config.run_dir / "summary.tsv", format_summary_tsv(rows));
    auto text = format_summary_text(rows);
    text += "best rows: " + std::to_string(result.best.size()) + ", failed records: " +
            std::to_string(result.failures) + "\n";
    write_file_atomic(config.run_dir / "report.txt", text);
    write_file_atomic(config.run_dir / "review.tsv", format_review_sheet(result, config.run_dir / "results"));
  }
  return result;
}

namespace {

bool any_target(std::span<const SummaryRow> rows) {
  return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.tgt_lpips.has_value(); });
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string opt_fixed(const std::optional<double>& v) { return v ? fixed(*v) : "-"; }

}  // namespace

std::string format_summary_tsv(std::span<const SummaryRow> rows) {
  const bool tgt = any_target(rows);
  std::ostringstream os;
  os << "method\tn\tsrc_lpips\tsrc_clip_i\ttgt_clip_cos";
  if (tgt) os << "\ttgt_lpips\ttgt_clip_i";
  os << '\n';
  for (const auto& r : rows) {
    os << r.label << '\t' << r.count << '\t' << format_real(r.src_lpips) << '\t' << format_real(r.src_clip_i) << '\t'
       << format_real(r.tgt_clip);
    if (tgt)
      os << '\t' << (r.tgt_lpips ? format_real(*r.tgt_lpips) : "") << '\t'
         << (r.tgt_clip_i ? format_real(*r.tgt_clip_i) : "");
    os << '\n';
  }
  return os.str();
}

std::string format_summary_text(std::span<const SummaryRow> rows) {
  const bool tgt = any_target(rows);
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Method", "N", "Src LPIPS", "Src CLIP-I", "Tgt CLIP (cos)"};
  if (tgt) {
    header.push_back("Tgt LPIPS");
    header.push_back("Tgt CLIP-I");
  }
  cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> c{r.label, std::to_string(r.count), fixed(r.src_lpips), fixed(r.src_clip_i),
                               fixed(r.tgt_clip)};
    if (tgt) {
      c.push_back(opt_fixed(r.tgt_lpips));
      c.push_back(opt_fixed(r.tgt_clip_i));
    }
    cells.push_back(std::move(c));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream os;
  auto rule = [&] {
    for (std::size_t i = 0; i < width.size(); ++i) os << (i ? "-+-" : "") << std::string(width[i], '-');
    os << '\n';
  };
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      if (i) os << " | ";
      const auto& s = cells[r][i];
      if (i == 0)
        os << s << std::string(width[i] - s.size(), ' ');
      else
        os << std::string(width[i] - s.size(), ' ') << s;
    }
    os << '\n';
    if (r == 0) rule();
  }
  return os.str();
}

std::string format_review_sheet(const ProtocolResult& result, const fs::path& results_dir) {
  std::set<std::size_t> best;
  for (const auto& [task, idx] : result.best) best.insert(idx);
  std::ostringstream os;
  os << "task_id\tseed\tarm\tauto_best\tsrc_lpips\tsrc_clip_i\ttgt_clip_cos\ttgt_lpips\ttgt_clip_i\timage\terror\thuman_"
        "pick\n";
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    os << r.task_id << '\t' << r.seed << '\t' << r.arm << '\t' << (best.contains(i) ? 1 : 0) << '\t'
       << format_real(r.src_lpips) << '\t' << format_real(r.src_clip_i) << '\t' << format_real(r.tgt_clip) << '\t'
       << (r.tgt_lpips ? format_real(*r.tgt_lpips) : "") << '\t' << (r.tgt_clip_i ? format_real(*r.tgt_clip_i) : "")
       << '\t' << (results_dir.empty() || !r.ok() ? "" : result_path(results_dir.parent_path(), r.task_id, r.seed).string())
       << '\t';
    if (r.error) {
      auto e = *r.error;
      std::replace_if(e.begin(), e.end(), [](char c) { return c == '\t' || c == '\n'; }, ' ');
      os << e;
    }
    os << "\t\n";
  }
  return os.str();
}

}  // namespace f2f
