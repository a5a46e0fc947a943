// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/stat.h>

#include <thread>

#include "f2f/error.hpp"
#include "f2f/image_io.hpp"
#include "f2f/pipeline.hpp"
#include "support/backends.hpp"
#include "support/fixtures.hpp"

using namespace f2f;
using f2f::testing::TempDir;

namespace {

struct Rig {
  TempDir dir;
  JobStore store{dir / "store"};
  VideoEngine engine{dir / "cache"};
  MockBackend backend;
  std::shared_ptr<ScriptedVlm> vlm =
      std::make_shared<ScriptedVlm>(std::vector<ScriptedVlm::Step>{}, rule_based_responder(7));
  std::shared_ptr<VlmGateway> gateway = std::make_shared<VlmGateway>(vlm, VlmConfig{});
  EditPipeline pipeline{store, engine, gateway};
};

EditTask scene_task() { return f2f::testing::make_task("scene", f2f::testing::scene_fixture(), "A green ball."); }

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("select spec parsing") {
    CHECK(SelectSpec::parse("auto").method == SelectionMethod::automatic);
    CHECK(SelectSpec::parse("last").method == SelectionMethod::last);
    const auto m = SelectSpec::parse("frame:28");
    CHECK(m.method == SelectionMethod::manual);
    CHECK(m.frame == 28);
    CHECK(m.str() == "frame:28");
    for (const char* bad : {"", "frame:", "frame:-1", "frame:2x", "first"})
      CHECK_THROWS_AS(SelectSpec::parse(bad), InvalidArgument);
  }

  TEST_CASE("job states") {
    for (auto s : {JobState::queued, JobState::captioning, JobState::generating, JobState::selecting, JobState::done,
                   JobState::failed})
      CHECK(parse_job_state(to_string(s)) == s);
    CHECK(state_rank(JobState::queued) < state_rank(JobState::captioning));
    CHECK(state_rank(JobState::selecting) < state_rank(JobState::done));
    CHECK_THROWS(parse_job_state("sleeping"));
    CHECK(video_frame_name(7) == "video/f_007.png");
  }

  TEST_CASE("end to end writes the job layout") {
    Rig rig;
    std::vector<JobState> stages;
    EditOptions o;
    const auto out = rig.pipeline.run(scene_task(), rig.backend, o, [&](JobState s) { stages.push_back(s); });
    CHECK(stages == std::vector<JobState>{JobState::queued, JobState::captioning, JobState::generating,
                                          JobState::selecting, JobState::done});
    CHECK(out.frame_count == 49);
    CHECK(out.selection.frame_index == 28);
    CHECK(out.selection.identifier == 7);
    CHECK(out.result.width() == 512);
    CHECK(out.result.height() == 512);
    CHECK(out.caption.text == "The scene very slowly and smoothly transforms into a green ball.");
    for (const char* f : {"source.png", "canvas.png", "caption.txt", "caption.rec", "video/f_001.png",
                          "video/f_049.png", "collage.png", "selection.rec", "result.png", "vlm_log.jsonl", "job.rec"})
      CHECK_MESSAGE(rig.store.has(out.job_id, f), f);
    CHECK(decode_image(*rig.store.get(out.job_id, "result.png")) == out.result);
    CHECK(out.result == postprocess(read_image(out.job_dir / "video/f_028.png")));
    const auto rec = load_job_record(rig.store, out.job_id);
    CHECK(rec.state == JobState::done);
    CHECK(rec.transitions.size() == 5);
    CHECK(rig.vlm->calls() == 2);

    // Frames are shared with the cache rather than copied.
    struct stat a{}, b{};
    REQUIRE(::stat((out.job_dir / "video/f_010.png").c_str(), &a) == 0);
    REQUIRE(::stat((rig.engine.cache_dir("mock", out.cache_key) / "f_010.png").c_str(), &b) == 0);
    CHECK(a.st_ino == b.st_ino);
  }

  TEST_CASE("rerun hits the cache and replaces the job") {
    Rig rig;
    const auto a = rig.pipeline.run(scene_task(), rig.backend, {});
    const auto b = rig.pipeline.run(scene_task(), rig.backend, {});
    CHECK(a.job_id == b.job_id);
    CHECK_FALSE(a.cache_hit);
    CHECK(b.cache_hit);
    CHECK(rig.backend.invocations() == 1);
    CHECK(a.result == b.result);
    EditOptions other;
    other.seed = 1;
    CHECK(rig.pipeline.run(scene_task(), rig.backend, other).job_id != a.job_id);
  }

  TEST_CASE("caption sources in priority order") {
    Rig rig;
    auto task = scene_task();
    task.temporal_caption = TemporalCaption{"The ball slowly turns green.", "manifest", "", {}};
    EditOptions o;
    o.select = SelectSpec::parse("last");
    CHECK(rig.pipeline.run(task, rig.backend, o).caption.text == "The ball slowly turns green.");
    CHECK(rig.vlm->calls() == 0);
    o.raw_caption = true;
    CHECK(rig.pipeline.run(task, rig.backend, o).caption.text == "A green ball.");
    o.caption_override = "The ball quickly spins around.";
    CHECK(rig.pipeline.run(task, rig.backend, o).caption.text == "The ball quickly spins around.");
    CHECK(rig.vlm->calls() == 0);
  }

  TEST_CASE("last and manual selection need no VLM") {
    Rig rig;
    EditPipeline no_vlm(rig.store, rig.engine, nullptr);
    auto task = scene_task();
    EditOptions o;
    o.raw_caption = true;
    o.select = SelectSpec::parse("last");
    const auto last = no_vlm.run(task, rig.backend, o);
    CHECK(last.selection.frame_index == 49);
    CHECK_FALSE(rig.store.has(last.job_id, "collage.png"));
    o.select = SelectSpec::parse("frame:0");
    const auto keep = no_vlm.run(task, rig.backend, o);
    CHECK(keep.result == postprocess(preprocess(task.source_image).image));
    o.select = SelectSpec::parse("auto");
    CHECK_THROWS_AS(no_vlm.run(task, rig.backend, o), InvalidArgument);
  }

  TEST_CASE("reselect overrides the automatic pick") {
    Rig rig;
    const auto out = rig.pipeline.run(scene_task(), rig.backend, {});
    const auto sel = rig.pipeline.reselect(out.job_id, 12);
    CHECK(sel.method == SelectionMethod::manual);
    CHECK(sel.frame_index == 12);
    CHECK(sel.collage_digest.has_value());
    CHECK(decode_image(*rig.store.get(out.job_id, "result.png")) ==
          postprocess(read_image(out.job_dir / "video/f_012.png")));
    rig.pipeline.reselect(out.job_id, 0);
    CHECK(decode_image(*rig.store.get(out.job_id, "result.png")) ==
          postprocess(read_image(out.job_dir / "canvas.png")));
    CHECK_THROWS_AS(rig.pipeline.reselect(out.job_id, 50), InvalidArgument);
    CHECK_THROWS_AS(rig.pipeline.reselect("no-such-job", 1), NotFound);
  }

  TEST_CASE("failures are persisted") {
    Rig rig;
    f2f::testing::BrokenBackend broken;
    EditOptions o;
    o.job_id = "will-fail";
    CHECK_THROWS_AS(rig.pipeline.run(scene_task(), broken, o), FatalError);
    const auto rec = load_job_record(rig.store, "will-fail");
    CHECK(rec.state == JobState::failed);
    REQUIRE(rec.error.has_value());
    CHECK(rec.error->find("rejected") != std::string::npos);
    CHECK_THROWS_AS(rig.pipeline.reselect("will-fail", 1), StateConflict);
  }

  TEST_CASE("manual pick posted during selection wins") {
    Rig rig;
    // VLM reply arrives only after the override has been stored.
    std::atomic<bool> overridden{false};
    auto slow = std::make_shared<ScriptedVlm>(
        std::vector<ScriptedVlm::Step>{}, [&](std::span<const VlmMessage> m) {
          const auto text = m.back().joined_text();
          if (text.find("The selected edit is:") == std::string::npos)
            return std::string("The ball slowly turns green.");
          while (!overridden) std::this_thread::sleep_for(std::chrono::milliseconds(2));
          return std::string("The selected edit is:3");
        });
    EditPipeline p(rig.store, rig.engine, std::make_shared<VlmGateway>(slow, VlmConfig{}));
    EditOptions o;
    o.job_id = "race";
    std::jthread runner([&] { p.run(scene_task(), rig.backend, o); });
    while (true) {
      if (rig.store.has("race", "job.rec") && load_job_record(rig.store, "race").state == JobState::selecting) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    p.reselect("race", 40);
    overridden = true;
    runner.join();
    const auto sel = Json::parse(*rig.store.get("race", "selection.rec")).get<FrameSelection>();
    CHECK(sel.frame_index == 40);
    CHECK(sel.method == SelectionMethod::manual);
    CHECK(load_job_record(rig.store, "race").state == JobState::done);
  }

  TEST_CASE("derived job ids") {
    const auto t = scene_task();
    EditOptions a, b;
    b.seed = 3;
    CHECK(derive_job_id(t, a, "mock") == derive_job_id(t, a, "mock"));
    CHECK(derive_job_id(t, a, "mock") != derive_job_id(t, b, "mock"));
    CHECK(derive_job_id(t, a, "mock") != derive_job_id(t, a, "other"));
    CHECK(derive_job_id(t, a, "mock").rfind("scene-", 0) == 0);
    CHECK_NOTHROW(validate_job_id(derive_job_id(t, a, "mock")));
  }
}
