// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "f2f/config.hpp"
#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/service.hpp"
#include "support/fixtures.hpp"

using namespace f2f;

TEST_SUITE("config") {
  TEST_CASE("parse key = value lines") {
    const auto c = Config::parse(
        "# comment\n"
        "store.root = /data/f2f   # trailing comment\n"
        "\n"
        "vlm.temperature = 0.5\n"
        "vlm.retries=5\n"
        "generation.num_frames = 25\n"
        "caption.zero_shot = true\n"
        "backend.default = mock\n");
    CHECK(c.get("store.root") == "/data/f2f");
    CHECK(c.get_double("vlm.temperature", 0) == 0.5);
    CHECK(c.get_int("vlm.retries", 0) == 5);
    CHECK(c.get_bool("caption.zero_shot", false));
    CHECK(c.get_or("vlm.model", "gpt-4o") == "gpt-4o");
    CHECK_FALSE(c.get("vlm.model").has_value());

    const auto v = vlm_config(c);
    CHECK(v.temperature == 0.5);
    CHECK(v.retries == 5);
    const auto p = pipeline_config(c);
    CHECK(p.params.num_frames == 25);
    CHECK(p.caption.bank.empty());
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(Config::parse("no equals sign\n"), ParseError);
    try {
      Config::parse("store.root = a\nnot.a.key = 1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(Config::parse("vlm.api_key = sk-123\n"), ParseError);
    CHECK_THROWS_AS(Config::parse("backend.x.client_secret = s\n"), ParseError);
    CHECK_THROWS_AS(validate_config_key("vlm.api_key"), InvalidArgument);
    CHECK_NOTHROW(validate_config_key("vlm.api_key_env"));
    const auto c = Config::parse("vlm.retries = many\n");
    CHECK_THROWS_AS(c.get_int("vlm.retries", 1), InvalidArgument);
    CHECK_THROWS_AS(Config::load("/nonexistent/f2f.conf"), Error);
  }

  TEST_CASE("backends and providers") {
    auto c = Config::parse(
        "backend.cog.endpoint = http://127.0.0.1:9000\n"
        "backend.cog.model = cogvideox-5b-i2v\n"
        "backend.small.type = mock\n"
        "backend.small.max_frames = 20\n");
    const auto b = make_backends(c);
    CHECK(b.size() == 3);
    CHECK(b.at("cog")->id() == "cog");
    CHECK(b.at("small")->capabilities().max_frames == 20);
    CHECK(b.at("mock")->capabilities().max_frames == 120);
    CHECK(default_backend(c) == "mock");

    CHECK(make_backends(Config::parse("backend.mock.type = none\n")).empty());
    CHECK_THROWS_AS(make_backends(Config::parse("backend.x.type = magic\n")), InvalidArgument);
    CHECK_THROWS_AS(make_backends(Config::parse("backend.x.model = m\n")), InvalidArgument);  // remote without endpoint

    CHECK(make_providers("stub", c)->id() == "stub");
    CHECK(make_providers("reference", c)->id() == "reference");
    CHECK_THROWS_AS(make_providers("clip", c), InvalidArgument);
  }

  TEST_CASE("adapters, roots and service options") {
    auto c = Config::parse("vlm.adapter = stub\nvlm.stub_selection = 3\nstore.root = /tmp/x\n");
    CHECK(make_vlm_adapter(c)->id() == "scripted");
    CHECK(make_vlm_adapter(Config::parse(""))->id() == "openai-chat");
    CHECK_THROWS_AS(make_vlm_adapter(Config::parse("vlm.adapter = claude\n")), InvalidArgument);
    CHECK(store_root(c) == "/tmp/x");
    CHECK(cache_root(c) == std::filesystem::path("/tmp/x") / "cache");
    CHECK(store_root(Config::parse("")) == "f2f-data");

    const auto s = service_options(Config::parse("service.port = 9999\nservice.queue_size = 2\n"));
    CHECK(s.port == 9999);
    CHECK(s.queue_size == 2);
    CHECK(s.host == "127.0.0.1");
    CHECK_THROWS_AS(service_options(Config::parse("service.workers = 0\n")), InvalidArgument);
  }

  TEST_CASE("load from file") {
    f2f::testing::TempDir dir;
    write_file_atomic(dir / "f2f.conf", "selection.stride = 2\n");
    CHECK(pipeline_config(Config::load(dir / "f2f.conf")).stride == 2);
  }
}
