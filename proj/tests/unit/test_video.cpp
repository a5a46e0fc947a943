// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <httplib.h>

#include <fstream>
#include <thread>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"
#include "f2f/job_store.hpp"
#include "f2f/records.hpp"
#include "f2f/video.hpp"
#include "support/backends.hpp"
#include "support/fixtures.hpp"

using namespace f2f;
using f2f::testing::TempDir;

namespace {

TemporalCaption caption(const std::string& text) { return {text, "test", "", {}}; }

class ShortBackend : public MockBackend {
 public:
  using MockBackend::MockBackend;
  std::vector<Image> generate(const Canvas& canvas, const TemporalCaption& c, std::int64_t seed,
                              const GenerationParams& params) override {
    auto f = MockBackend::generate(canvas, c, seed, params);
    f.pop_back();
    return f;
  }
};

struct FakeVideoServer {
  httplib::Server srv;
  std::jthread thread;
  int port = 0;
  std::vector<Image> frames;
  std::string container_bytes;
  int polls_before_done = 2;
  std::atomic<int> polls{0};
  std::string last_prompt;

  FakeVideoServer() {
    srv.Post("/generations", [this](const httplib::Request& req, httplib::Response& res) {
      const auto j = Json::parse(req.body);
      last_prompt = j.at("prompt").get<std::string>();
      res.status = 201;
      res.set_content(R"({"id":"g1","status":"queued"})", "application/json");
    });
    srv.Get("/generations/g1", [this](const httplib::Request&, httplib::Response& res) {
      if (++polls < polls_before_done) {
        res.set_content(R"({"id":"g1","status":"running"})", "application/json");
        return;
      }
      Json out{{"id", "g1"}, {"status", "succeeded"}};
      if (container_bytes.empty()) {
        Json fs = Json::array();
        for (const auto& f : frames) fs.push_back(base64_encode(encode_png(f)));
        out["output"] = {{"frames", fs}};
      } else {
        out["output"] = {{"video_url", "http://127.0.0.1:" + std::to_string(port) + "/files/v.mkv"}};
      }
      res.set_content(out.dump(), "application/json");
    });
    srv.Get("/files/v.mkv", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(container_bytes, "video/x-matroska");
    });
    port = srv.bind_to_any_port("127.0.0.1");
    thread = std::jthread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }
  ~FakeVideoServer() { srv.stop(); }

  RemoteBackendConfig config() const {
    RemoteBackendConfig c;
    c.id = "fake";
    c.endpoint = "http://127.0.0.1:" + std::to_string(port);
    c.poll_interval = std::chrono::milliseconds(5);
    c.max_wait = std::chrono::seconds(20);
    c.request_timeout = std::chrono::seconds(20);
    return c;
  }
};

}  // namespace

TEST_SUITE("video") {
  TEST_CASE("preprocess geometry") {
    const auto c = preprocess(f2f::testing::smooth_fixture(0, 256));
    CHECK(c.image.width() == 720);
    CHECK(c.image.height() == 480);
    CHECK(c.pad_left == 120);
    CHECK(c.pad_right == 120);
    CHECK_FALSE(c.warning.has_value());
    for (int y = 0; y < 480; y += 17) {
      CHECK(c.image.at(0, y) == Rgb{0, 0, 0});
      CHECK(c.image.at(119, y) == Rgb{0, 0, 0});
      CHECK(c.image.at(600, y) == Rgb{0, 0, 0});
      CHECK(c.image.at(719, y) == Rgb{0, 0, 0});
    }
    const auto wide = preprocess(Image(300, 200, Rgb{9, 9, 9}));
    CHECK(wide.warning.has_value());
    CHECK(wide.image.at(360, 240) == Rgb{9, 9, 9});
    CHECK_THROWS_AS(preprocess(Image(7, 7)), InvalidArgument);
  }

  TEST_CASE("crop of pad is the identity") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
      const auto img = f2f::testing::random_image(rng, 480, 480);
      REQUIRE(crop_inner(pad_to_canvas(img)) == img);
    }
    CHECK_THROWS_AS(pad_to_canvas(Image(479, 480)), InvalidArgument);
    CHECK_THROWS_AS(postprocess(Image(512, 512)), InvalidArgument);
  }

  TEST_CASE("preprocess then postprocess stays close to a direct resize") {
    for (int i = 0; i < 10; ++i) {
      const auto src = f2f::testing::smooth_fixture(i);
      const auto round = postprocess(preprocess(src).image);
      CHECK(round.width() == 512);
      CHECK(round.height() == 512);
      const double db = psnr(round, resize_bilinear(src, 512, 512));
      CAPTURE(i);
      CHECK(db >= 35.0);
    }
  }

  TEST_CASE("resize and crop helpers") {
    std::mt19937_64 rng(5);
    const auto img = f2f::testing::random_image(rng, 40, 30);
    CHECK(resize_bilinear(img, 40, 30) == img);
    CHECK(resize_box_integer(img, 40, 30) == img);
    Image flat(40, 30, Rgb{10, 200, 30});
    CHECK(resize_bilinear(flat, 17, 9) == Image(17, 9, Rgb{10, 200, 30}));
    CHECK(resize_box_integer(flat, 17, 9) == Image(17, 9, Rgb{10, 200, 30}));
    CHECK(center_square(img) == Rect{5, 0, 30, 30});
    CHECK(crop(img, {1, 2, 3, 4}).at(0, 0) == img.at(1, 2));
    CHECK(std::isinf(psnr(img, img)));
    CHECK(mse(Image(2, 2, Rgb{0, 0, 0}), Image(2, 2, Rgb{10, 10, 10})) == doctest::Approx(100.0));
  }

  TEST_CASE("mock frames: first equals canvas, content is deterministic") {
    const auto canvas = preprocess(f2f::testing::scene_fixture());
    MockBackend mock;
    const auto a = mock.generate(canvas, caption("The ball slowly turns blue."), 3, {});
    const auto b = mock.generate(canvas, caption("The ball slowly turns blue."), 3, {});
    const auto c = mock.generate(canvas, caption("The ball slowly turns blue."), 4, {});
    REQUIRE(a.size() == 49);
    CHECK(a.front() == canvas.image);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(mock.invocations() == 3);
    // Drift from the canvas grows along the clip.
    CHECK(mean_abs_diff(a[10], canvas.image) <= mean_abs_diff(a[48], canvas.image));
  }

  TEST_CASE("transform scripts validate against the canvas") {
    const auto canvas = preprocess(f2f::testing::scene_fixture());
    TransformScript s;
    s.ops.push_back(RecolorRamp{{700, 0, 100, 100}, {1, 2, 3}, 0, 1});
    CHECK_THROWS_AS(s.validate(canvas.image), InvalidArgument);
    TransformScript singular;
    singular.ops.push_back(AffineRamp{{0, 0, 0, 0, 0, 0}});
    CHECK_THROWS_AS(singular.validate(canvas.image), InvalidArgument);
    TransformScript bright;
    bright.ops.push_back(BrightnessRamp{0, 40});
    const auto v = synth_video(canvas, bright, {6.0, 5, 50, 8});
    REQUIRE(v.frame_count() == 5);
    CHECK(v.frame(1) == canvas.image);
    CHECK(v.frame(5).at(360, 240)[2] > v.frame(3).at(360, 240)[2]);
  }

  TEST_CASE("engine caches by content and namespaces by backend") {
    TempDir dir;
    VideoEngine engine(dir / "cache");
    const auto canvas = preprocess(f2f::testing::scene_fixture());
    MockBackend mock;
    const auto first = engine.generate(mock, canvas, caption("The ball slowly rolls left."), 1);
    CHECK_FALSE(first.cache_hit);
    CHECK(first.video.frame_count() == 49);
    CHECK(std::filesystem::exists(first.cache_dir / "f_049.png"));
    CHECK(std::filesystem::exists(first.cache_dir / "meta.rec"));
    CHECK(first.cache_key == cache_key(pixel_digest(canvas.image), "The ball slowly rolls left.", {}, 1));

    const auto second = engine.generate(mock, canvas, caption("The ball slowly rolls left."), 1);
    CHECK(second.cache_hit);
    CHECK(mock.invocations() == 1);
    CHECK(second.video.frames == first.video.frames);

    // A fresh engine on the same root reuses the on-disk cache.
    VideoEngine again(dir / "cache");
    CHECK(again.generate(mock, canvas, caption("The ball slowly rolls left."), 1).cache_hit);
    CHECK(mock.invocations() == 1);

    MockBackend other("other");
    CHECK_FALSE(engine.generate(other, canvas, caption("The ball slowly rolls left."), 1).cache_hit);
    CHECK(other.invocations() == 1);

    engine.generate(mock, canvas, caption("The ball slowly rolls left."), 2);
    CHECK(mock.invocations() == 2);
  }

  TEST_CASE("concurrent requests for one key share a single backend call") {
    TempDir dir;
    VideoEngine engine(dir / "cache");
    const auto canvas = preprocess(f2f::testing::scene_fixture());
    f2f::testing::GateBackend gate;
    std::vector<GenerateResult> results(4);
    {
      std::vector<std::jthread> ts;
      for (int i = 0; i < 4; ++i)
        ts.emplace_back([&, i] { results[static_cast<std::size_t>(i)] = engine.generate(gate, canvas, caption("Same."), 0); });
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      gate.release();
    }
    CHECK(gate.calls.load() == 1);
    for (const auto& r : results) CHECK(r.video.frames == results[0].video.frames);
  }

  TEST_CASE("short or oversized generations are rejected") {
    TempDir dir;
    VideoEngine engine(dir / "cache");
    const auto canvas = preprocess(f2f::testing::scene_fixture());
    ShortBackend shorty("short");
    CHECK_THROWS_AS(engine.generate(shorty, canvas, caption("Any caption here."), 0), IntegrityError);
    CHECK_FALSE(engine.lookup("short", cache_key(pixel_digest(canvas.image), "Any caption here.", {}, 0)));
    MockBackend small("small", std::nullopt, {10, 720, 480, true});
    CHECK_THROWS_AS(engine.generate(small, canvas, caption("Any caption here."), 0), InvalidArgument);
  }

  TEST_CASE("lossless container round trip and truncation") {
    TempDir dir;
    std::vector<Image> frames;
    for (int t = 0; t < 9; ++t) frames.push_back(f2f::testing::integer_pattern(64, 48, t));
    encode_frames(frames, 8, dir / "clip.mkv");
    const auto back = extract_frames(dir / "clip.mkv", 8);
    REQUIRE(back.size() == frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) CHECK(back[i] == frames[i]);

    const auto bytes = read_file(dir / "clip.mkv");
    write_file_atomic(dir / "cut.mkv", bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(extract_frames(dir / "cut.mkv", 8), IoError);
    write_file_atomic(dir / "junk.mkv", "nothing to see");
    CHECK_THROWS_AS(extract_frames(dir / "junk.mkv", 8), IoError);
  }

  TEST_CASE("remote backend: inline frames") {
    FakeVideoServer server;
    const auto canvas = preprocess(f2f::testing::scene_fixture());
    GenerationParams p;
    p.num_frames = 9;
    server.frames = synth_video(canvas, TransformScript::derive("x", 0, canvas), p).frames;
    RemoteBackend backend(server.config());
    const auto frames = backend.generate(canvas, caption("The ball slowly grows."), 0, p);
    CHECK(frames == server.frames);
    CHECK(server.last_prompt == "The ball slowly grows.");
    CHECK(server.polls.load() >= 2);
  }

  TEST_CASE("remote backend: container download and integrity checks") {
    FakeVideoServer server;
    TempDir dir;
    const auto canvas = preprocess(f2f::testing::scene_fixture());
    GenerationParams p;
    p.num_frames = 5;
    auto frames = synth_video(canvas, TransformScript::derive("x", 0, canvas), p).frames;
    encode_frames(frames, 8, dir / "v.mkv");
    server.container_bytes = read_file(dir / "v.mkv");
    RemoteBackend backend(server.config());
    CHECK(backend.generate(canvas, caption("c"), 0, p) == frames);

    server.container_bytes.clear();
    server.polls = 0;
    server.frames = frames;
    server.frames.pop_back();
    CHECK_THROWS_AS(backend.generate(canvas, caption("c"), 0, p), IntegrityError);

    server.polls = 0;
    server.frames = frames;
    server.frames.front() = Image(720, 480, Rgb{255, 255, 255});
    CHECK_THROWS_AS(backend.generate(canvas, caption("c"), 0, p), IntegrityError);
  }

  TEST_CASE("remote backend config errors") {
    RemoteBackendConfig c;
    CHECK_THROWS_AS(RemoteBackend{c}, InvalidArgument);
  }
}
