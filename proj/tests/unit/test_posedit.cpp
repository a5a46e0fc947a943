// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "f2f/error.hpp"
#include "f2f/image_io.hpp"
#include "f2f/manifest.hpp"
#include "f2f/posedit.hpp"
#include "support/posedit_corpus.hpp"

using namespace f2f;
using f2f::testing::TempDir;

TEST_SUITE("posedit") {
  TEST_CASE("8 x 8 corpus with 6 gaps") {
    TempDir dir;
    const auto spec = f2f::testing::make_pose_corpus(dir / "corpus");
    const auto build = build_posedit(dir / "corpus", spec, dir / "out");
    CHECK(build.tasks.size() == 58);
    CHECK(build.warnings.size() == 6);

    const auto loaded = load_manifest(build.manifest);
    REQUIRE(loaded.size() == 58);
    std::set<std::string> ids;
    for (const auto& t : loaded) {
      ids.insert(t.id);
      REQUIRE(t.has_gt());
      CHECK(std::filesystem::exists(*t.gt_target_path));
      CHECK(t.category.has_value());
      CHECK(t.source_description == std::string(kNeutralPoseDescription));
      REQUIRE(t.annotation.has_value());
      // Frames encode their own index in the red channel.
      CHECK(t.source_image.at(0, 0)[0] == f2f::testing::pose_frame_marker(t.annotation->source_index));
      CHECK(t.gt_target_image->at(0, 0)[0] == f2f::testing::pose_frame_marker(t.annotation->peak_index));
    }
    CHECK(ids.size() == 58);
    for (const auto& gap : f2f::testing::kPoseGaps) CHECK_FALSE(ids.contains(gap));
  }

  TEST_CASE("overrides pick frames") {
    TempDir dir;
    auto spec = f2f::testing::make_pose_corpus(dir / "corpus");
    spec.overrides[{"s00", "wave"}] = PoseCellOverride{2, 5, false};
    const auto build = build_posedit(dir / "corpus", spec, dir / "out");
    const auto it = std::find_if(build.tasks.begin(), build.tasks.end(), [](const auto& t) { return t.id == "s00-wave"; });
    REQUIRE(it != build.tasks.end());
    CHECK(it->annotation == FrameAnnotation{2, 5});
    CHECK(it->temporal_caption->generator_id == "posedit-spec");
  }

  TEST_CASE("out of range annotation names the cell") {
    TempDir dir;
    auto spec = f2f::testing::make_pose_corpus(dir / "corpus");
    spec.overrides[{"s03", "squat"}] = PoseCellOverride{std::nullopt, 99, false};
    try {
      build_posedit(dir / "corpus", spec, dir / "out");
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("s03/squat") != std::string::npos);
    }
  }

  TEST_CASE("spec json round trip and validation") {
    TempDir dir;
    auto spec = f2f::testing::make_pose_corpus(dir / "corpus");
    spec.save(dir / "spec.json");
    const auto back = PoseEditSpec::load(dir / "spec.json");
    CHECK(back.categories.size() == 8);
    CHECK(back.overrides.size() == spec.overrides.size());
    CHECK(back.source_description == spec.source_description);
    PoseEditSpec empty;
    CHECK_THROWS_AS(empty.validate(), InvalidArgument);
    auto dup = spec;
    dup.categories.push_back(dup.categories.front());
    CHECK_THROWS_AS(dup.validate(), InvalidArgument);
    CHECK_THROWS_AS(build_posedit(dir / "missing", spec, dir / "out"), NotFound);
  }
}
