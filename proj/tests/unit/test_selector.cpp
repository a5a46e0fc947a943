// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "f2f/error.hpp"
#include "f2f/prompts.hpp"
#include "f2f/selector.hpp"
#include "support/collage_golden.hpp"
#include "support/fixtures.hpp"

using namespace f2f;
using f2f::testing::integer_pattern;

namespace {

VideoSequence pattern_video(int T) {
  VideoSequence v;
  for (int t = 1; t <= T; ++t) v.frames.push_back(integer_pattern(720, 480, t));
  return v;
}

VlmGateway gateway(std::shared_ptr<ScriptedVlm> a) {
  VlmConfig c;
  c.backoff_initial = std::chrono::milliseconds(1);
  return VlmGateway(std::move(a), c);
}

}  // namespace

TEST_SUITE("selector") {
  TEST_CASE("sampling indices") {
    const auto idx = sampled_indices(49, 4);
    REQUIRE(idx.size() == 12);
    for (std::size_t m = 0; m < idx.size(); ++m) CHECK(idx[m] == 4 * static_cast<int>(m + 1));
    CHECK(sampled_indices(5, 4) == std::vector<int>{4});
    CHECK(sampled_indices(9, 1).size() == 8);  // frame 1 is never offered
    CHECK(sampled_indices(9, 1).front() == 2);
    CHECK_THROWS_AS(sampled_indices(4, 4), InvalidArgument);
    CHECK_THROWS_AS(sampled_indices(49, 0), InvalidArgument);

    const auto s = sample_frames(pattern_video(49));
    REQUIRE(s.size() == 12);
    for (std::size_t m = 0; m < s.size(); ++m) {
      CHECK(s[m].identifier == static_cast<int>(m + 1));
      CHECK(s[m].frame == integer_pattern(720, 480, s[m].frame_index));
    }
  }

  TEST_CASE("collage layout") {
    const auto video = pattern_video(49);
    const auto c = build_collage(integer_pattern(256, 256, 100), sample_frames(video));
    CHECK(c.cols == 4);
    CHECK(c.rows == 3);
    CHECK(c.image.width() == 8 + 4 * (240 + 8));
    CHECK(c.image.height() == 8 + 320 + 8 + 3 * (160 + 8));
    CHECK(c.source_slot == Rect{(1000 - 320) / 2, 8, 320, 320});
    REQUIRE(c.cells.size() == 12);
    for (const auto& cell : c.cells) {
      CHECK(c.image.bounds().contains(cell.region));
      CHECK_FALSE(cell.region.intersects(c.source_slot));
      CHECK(cell.frame_index == 4 * cell.identifier);
      // Stamp box is black at its corner.
      CHECK(c.image.at(cell.region.x, cell.region.y) == Rgb{0, 0, 0});
    }
    for (std::size_t i = 0; i < c.cells.size(); ++i)
      for (std::size_t j = i + 1; j < c.cells.size(); ++j) CHECK_FALSE(c.cells[i].region.intersects(c.cells[j].region));
    CHECK(c.cell(7).frame_index == 28);
    CHECK_THROWS_AS(c.cell(13), InvalidArgument);
    CHECK(c.image.at(0, 0) == Rgb{24, 24, 24});

    // A wide source keeps its aspect ratio inside the slot.
    const auto wide = build_collage(integer_pattern(400, 200, 1), sample_frames(video));
    CHECK(wide.source_slot.width == 2 * wide.source_slot.height);
  }

  TEST_CASE("collage digest matches the frozen golden") {
    const auto c = build_collage(integer_pattern(256, 256, 100), sample_frames(pattern_video(49)));
    CHECK(c.digest() == f2f::testing::kCollageGoldenDigest);
    // Rebuilding is bit-identical.
    CHECK(build_collage(integer_pattern(256, 256, 100), sample_frames(pattern_video(49))).image == c.image);
  }

  TEST_CASE("collage input checks") {
    CHECK_THROWS_AS(build_collage(Image(8, 8), {}), InvalidArgument);
    std::vector<SampledFrame> many;
    for (int i = 1; i <= 17; ++i) many.push_back({i, i, Image(30, 20)});
    CHECK_THROWS_AS(build_collage(Image(8, 8), many), InvalidArgument);
    std::vector<SampledFrame> mixed{{1, 2, Image(30, 20)}, {2, 3, Image(31, 20)}};
    CHECK_THROWS_AS(build_collage(Image(8, 8), mixed), InvalidArgument);
  }

  TEST_CASE("digit stamps differ per number") {
    Image a(40, 20, Rgb{9, 9, 9}), b(40, 20, Rgb{9, 9, 9});
    const auto box = stamp_number(a, 1, 1, 7);
    stamp_number(b, 1, 1, 1);
    CHECK(box == Rect{1, 1, 11, 13});
    CHECK(a != b);
    Image c(40, 20);
    CHECK(stamp_number(c, 0, 0, 12).width == 4 + 7 + 1 + 7);
    CHECK_THROWS_AS(stamp_number(c, 0, 0, -1), InvalidArgument);
  }

  TEST_CASE("automatic selection maps identifiers to frames") {
    const auto video = pattern_video(49);
    const auto collage = build_collage(integer_pattern(64, 64, 3), sample_frames(video));
    const auto task = f2f::testing::make_task("t", integer_pattern(64, 64, 3), "A dog.");

    auto a = ScriptedVlm::replies({"The selected edit is:7"});
    auto gw = gateway(a);
    auto sel = select_frame_auto(collage, task, 49, gw);
    CHECK(sel.frame_index == 28);
    CHECK(sel.identifier == 7);
    CHECK(sel.collage_digest == collage.digest());
    CHECK_FALSE(sel.fallback);
    const auto req = a->requests().at(0).at(0);
    CHECK(req.joined_text() == prompts::selection_instruction("A dog.", 12));
    CHECK_FALSE(req.parts[0].is_text());

    auto zero = ScriptedVlm::replies({"The selected edit is:0"});
    auto gw0 = gateway(zero);
    sel = select_frame_auto(collage, task, 49, gw0);
    CHECK(sel.frame_index == 0);
    CHECK(sel.identifier == 0);

    auto retry = ScriptedVlm::replies({"I like 3", "The selected edit is:3."});
    auto gwr = gateway(retry);
    sel = select_frame_auto(collage, task, 49, gwr);
    CHECK(sel.frame_index == 12);
    CHECK(retry->calls() == 2);

    auto junk = ScriptedVlm::replies({"no idea", "The selected edit is:44"});
    auto gwj = gateway(junk);
    sel = select_frame_auto(collage, task, 49, gwj);
    CHECK(sel.fallback);
    CHECK(sel.frame_index == 49);
    CHECK(sel.warning.has_value());
  }

  TEST_CASE("last and manual selection") {
    CHECK(select_last(49).frame_index == 49);
    CHECK(select_last(49).method == SelectionMethod::last);
    CHECK_THROWS_AS(select_last(0), InvalidArgument);
    CHECK(select_manual(0, 49).frame_index == 0);
    CHECK(select_manual(28, 49).frame_index == 28);
    CHECK(select_manual(28, 49).method == SelectionMethod::manual);
    CHECK_THROWS_AS(select_manual(50, 49), InvalidArgument);
    CHECK_THROWS_AS(select_manual(-1, 49), InvalidArgument);
    FrameSelection s = select_manual(12, 49);
    CHECK_NOTHROW(s.validate(49));
    CHECK_THROWS_AS(s.validate(10), InvalidArgument);
  }
}
