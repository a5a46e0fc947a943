// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/service.hpp"

#include <httplib.h>

#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include "f2f/error.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"
#include "f2f/records.hpp"

namespace f2f {

ServiceOptions service_options(const Config& c) {
  ServiceOptions o;
  o.host = c.get_or("service.host", o.host);
  o.port = static_cast<int>(c.get_int("service.port", o.port));
  o.queue_size = static_cast<int>(c.get_int("service.queue_size", o.queue_size));
  o.workers = static_cast<int>(c.get_int("service.workers", o.workers));
  o.cors_origin = c.get_or("service.cors_origin", o.cors_origin);
  if (o.queue_size < 1 || o.workers < 1) throw InvalidArgument("service.queue_size and service.workers must be >= 1");
  return o;
}

namespace {

struct Pending {
  std::string job_id;
  EditTask task;
  std::shared_ptr<VideoBackend> backend;
  EditOptions options;
};

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                Json extra = Json::object()) {
  Json body{{"error", {{"code", code}, {"message", message}}}};
  for (auto& [k, v] : extra.items()) body["error"][k] = v;
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string new_job_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[32];
  std::snprintf(buf, sizeof buf, "job-%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

std::optional<std::string> form_field(const httplib::Request& req, const std::string& key) {
  if (req.has_file(key)) return req.get_file_value(key).content;
  if (req.has_param(key)) return req.get_param_value(key);
  return std::nullopt;
}

}  // namespace

struct EditService::Impl {
  JobStore& store;
  VideoEngine& engine;
  BackendMap backends;
  std::string default_backend;
  ServiceOptions options;
  EditPipeline pipeline;
  httplib::Server server;
  std::thread server_thread;
  std::vector<std::thread> workers;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Pending> queue;
  bool stopping = false;
  int bound_port = 0;

  Impl(JobStore& s, VideoEngine& e, std::shared_ptr<VlmGateway> g, BackendMap b, std::string def, PipelineConfig p,
       ServiceOptions o)
      : store(s),
        engine(e),
        backends(std::move(b)),
        default_backend(std::move(def)),
        options(std::move(o)),
        pipeline(s, e, std::move(g), std::move(p)) {
    recover();
    routes();
    for (int i = 0; i < options.workers; ++i) workers.emplace_back([this] { work(); });
  }

  // Jobs that were in flight when a previous process stopped cannot resume.
  void recover() {
    for (const auto& id : store.list()) {
      try {
        auto rec = load_job_record(store, id);
        if (rec.state == JobState::done || rec.state == JobState::failed) continue;
        rec.error = "interrupted by a service restart";
        save_job_record(store, rec, JobState::failed);
      } catch (const Error&) {
      }
    }
  }

  void work() {
    while (true) {
      Pending p;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        p = std::move(queue.front());
        queue.pop_front();
      }
      try {
        pipeline.run(p.task, *p.backend, p.options);
      } catch (const std::exception& e) {
        std::clog << "job " << p.job_id << " failed: " << e.what() << '\n';
      }
    }
  }

  Json job_document(const std::string& id) {
    const auto rec = load_job_record(store, id);
    Json doc = rec;
    const auto base = "/v1/edits/" + id;
    Json links{{"self", base}, {"frames", base + "/frames/{k}"}};
    if (auto c = store.get(id, "caption.rec")) {
      const auto cap = Json::parse(*c).get<TemporalCaption>();
      doc["temporal_caption"] = cap.text;
      doc["caption"] = Json(cap);
    }
    if (auto s = store.get(id, "selection.rec")) doc["selection"] = Json::parse(*s);
    if (store.has(id, "collage.png")) links["collage"] = base + "/collage";
    if (store.has(id, "result.png")) links["result"] = base + "/result";
    if (store.has(id, "canvas.png")) links["canvas"] = base + "/canvas";
    doc["links"] = links;
    return doc;
  }

  void serve_png(httplib::Response& res, const std::string& id, const std::string& name) {
    if (!store.exists(id) || !store.has(id, "job.rec")) return send_error(res, 404, "unknown_job", "no job " + id);
    auto bytes = store.get(id, name);
    if (!bytes) return send_error(res, 404, "not_ready", name + " has not been produced yet");
    res.status = 200;
    res.set_content(std::move(*bytes), "image/png");
  }

  Json backend_list() const {
    Json a = Json::array();
    for (const auto& [k, v] : backends) a.push_back(k);
    return a;
  }

  void submit(const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data())
      return send_error(res, 400, "bad_request", "expected multipart/form-data with image and prompt");
    Json opts = Json::object();
    if (auto o = form_field(req, "options")) {
      try {
        opts = Json::parse(*o);
      } catch (const Json::exception&) {
        return send_error(res, 400, "bad_options", "options is not valid JSON");
      }
      if (!opts.is_object()) return send_error(res, 400, "bad_options", "options must be an object");
    }
    for (const char* k : {"seed", "selection_mode", "backend_id", "raw_caption", "temporal_caption"})
      if (auto v = form_field(req, k); v && !opts.contains(k)) opts[k] = *v;

    const auto prompt = form_field(req, "prompt").value_or("");
    if (std::string(trim_view(prompt)).empty()) return send_error(res, 400, "empty_prompt", "prompt is empty");
    const auto image_bytes = form_field(req, "image");
    if (!image_bytes || image_bytes->empty()) return send_error(res, 400, "missing_image", "image part is missing");

    EditTask task;
    try {
      task.source_image = decode_image(*image_bytes);
    } catch (const Error& e) {
      return send_error(res, 400, "undecodable_image", e.what());
    }
    task.target_caption = prompt;

    EditOptions eo;
    std::string backend_id = default_backend;
    try {
      if (opts.contains("seed")) {
        const auto& s = opts["seed"];
        eo.seed = s.is_string() ? std::stoll(s.get<std::string>()) : s.get<std::int64_t>();
      }
      if (opts.contains("selection_mode")) eo.select = SelectSpec::parse(opts["selection_mode"].get<std::string>());
      if (opts.contains("backend_id")) backend_id = opts["backend_id"].get<std::string>();
      if (opts.contains("raw_caption")) {
        const auto& r = opts["raw_caption"];
        eo.raw_caption = r.is_boolean() ? r.get<bool>() : (r.get<std::string>() == "true" || r.get<std::string>() == "1");
      }
      if (opts.contains("temporal_caption")) {
        eo.caption_override = opts["temporal_caption"].get<std::string>();
        TemporalCaption{*eo.caption_override, "user", "", {}}.validate();
      }
    } catch (const std::exception& e) {
      return send_error(res, 400, "bad_options", e.what());
    }
    const auto it = backends.find(backend_id);
    if (it == backends.end())
      return send_error(res, 400, "unknown_backend", "backend '" + backend_id + "' is not configured",
                        {{"backends", backend_list()}});

    const auto id = new_job_id();
    task.id = id;
    eo.job_id = id;
    {
      std::lock_guard lock(mu);
      if (static_cast<int>(queue.size()) >= options.queue_size)
        return send_error(res, 503, "queue_full", "job queue is full, retry later");
      JobRecord rec;
      rec.job_id = id;
      rec.task_id = id;
      rec.prompt = prompt;
      rec.backend_id = backend_id;
      rec.seed = eo.seed;
      rec.select = eo.select.str();
      rec.raw_caption = eo.raw_caption;
      rec.params = pipeline.config().params;
      store.put(id, "source.png", encode_png(task.source_image));
      save_job_record(store, rec, JobState::queued);
      queue.push_back({id, std::move(task), it->second, eo});
    }
    cv.notify_one();
    res.set_header("Location", "/v1/edits/" + id);
    send_json(res, 202, {{"job_id", id}, {"state", "queued"}, {"links", {{"self", "/v1/edits/" + id}}}});
  }

  static std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    });

    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });
    server.Get("/v1/backends", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"backends", backend_list()}, {"default", default_backend}});
    });
    server.Post("/v1/edits", [this](const httplib::Request& req, httplib::Response& res) { submit(req, res); });

    const std::string id_re = R"(/v1/edits/([A-Za-z0-9][A-Za-z0-9._-]{0,127}))";
    server.Get(id_re, [this](const httplib::Request& req, httplib::Response& res) {
      const auto id = req.matches[1].str();
      try {
        send_json(res, 200, job_document(id));
      } catch (const NotFound& e) {
        send_error(res, 404, "unknown_job", e.what());
      }
    });
    server.Get(id_re + R"(/frames/(-?\d{1,9}))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto id = req.matches[1].str();
      const int k = std::stoi(req.matches[2].str());
      JobRecord rec;
      try {
        rec = load_job_record(store, id);
      } catch (const NotFound& e) {
        return send_error(res, 404, "unknown_job", e.what());
      }
      const int t = rec.frame_count.value_or(rec.params.num_frames);
      if (k < 1 || k > t)
        return send_error(res, 416, "frame_out_of_range",
                          "frame " + std::to_string(k) + " outside 1.." + std::to_string(t));
      serve_png(res, id, video_frame_name(k));
    });
    server.Get(id_re + "/collage", [this](const httplib::Request& req, httplib::Response& res) {
      serve_png(res, req.matches[1].str(), "collage.png");
    });
    server.Get(id_re + "/result", [this](const httplib::Request& req, httplib::Response& res) {
      serve_png(res, req.matches[1].str(), "result.png");
    });
    server.Get(id_re + "/canvas", [this](const httplib::Request& req, httplib::Response& res) {
      serve_png(res, req.matches[1].str(), "canvas.png");
    });
    server.Get(id_re + "/source", [this](const httplib::Request& req, httplib::Response& res) {
      serve_png(res, req.matches[1].str(), "source.png");
    });
    server.Post(id_re + "/selection", [this](const httplib::Request& req, httplib::Response& res) {
      const auto id = req.matches[1].str();
      int k = 0;
      try {
        const auto body = Json::parse(req.body);
        k = body.at("frame_index").get<int>();
      } catch (const Json::exception&) {
        return send_error(res, 400, "bad_request", "body must be {\"frame_index\": <int>}");
      }
      try {
        pipeline.reselect(id, k);
        send_json(res, 200, job_document(id));
      } catch (const NotFound& e) {
        send_error(res, 404, "unknown_job", e.what());
      } catch (const StateConflict& e) {
        send_error(res, 409, "invalid_state", e.what());
      } catch (const InvalidArgument& e) {
        send_error(res, 400, "bad_frame_index", e.what());
      }
    });
  }

  int bind() {
    bound_port = options.port == 0 ? server.bind_to_any_port(options.host)
                                   : (server.bind_to_port(options.host, options.port) ? options.port : -1);
    if (bound_port <= 0)
      throw IoError("cannot bind " + options.host + ":" + std::to_string(options.port), options.host);
    return bound_port;
  }

  void shutdown() {
    {
      std::lock_guard lock(mu);
      if (stopping) return;
      stopping = true;
    }
    cv.notify_all();
    server.stop();
    if (server_thread.joinable()) server_thread.join();
    for (auto& w : workers)
      if (w.joinable()) w.join();
  }
};

EditService::EditService(JobStore& store, VideoEngine& engine, std::shared_ptr<VlmGateway> gateway,
                         BackendMap backends, std::string default_backend, PipelineConfig pipeline,
                         ServiceOptions options)
    : impl_(std::make_unique<Impl>(store, engine, std::move(gateway), std::move(backends), std::move(default_backend),
                                   std::move(pipeline), std::move(options))) {}

EditService::~EditService() { stop(); }

int EditService::start() {
  const int port = impl_->bind();
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void EditService::run() {
  impl_->bind();
  impl_->server.listen_after_bind();
}

void EditService::stop() {
  if (impl_) impl_->shutdown();
}

int EditService::port() const { return impl_->bound_port; }

}  // namespace f2f
