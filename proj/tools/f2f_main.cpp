// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

// f2f command-line tool: edit, eval, posedit build, manifold, serve.

#include <CLI11.hpp>

#include <pthread.h>

#include <csignal>
#include <iostream>
#include <optional>

#include "f2f/config.hpp"
#include "f2f/error.hpp"
#include "f2f/image_io.hpp"
#include "f2f/manifest.hpp"
#include "f2f/manifold.hpp"
#include "f2f/pipeline.hpp"
#include "f2f/posedit.hpp"
#include "f2f/protocol.hpp"
#include "f2f/service.hpp"
#include "f2f/text.hpp"

namespace fs = std::filesystem;
using namespace f2f;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

struct Common {
  std::string config_path;
  std::string store;
  std::string vlm;

  Config load() const {
    auto c = config_path.empty() ? Config{} : Config::load(config_path);
    if (!store.empty()) c.set("store.root", store);
    if (!vlm.empty()) c.set("vlm.adapter", vlm);
    return c;
  }
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--store", common.store, "data directory (overrides store.root)");
  cmd->add_option("--vlm", common.vlm, "VLM adapter: openai or stub")->check(CLI::IsMember({"openai", "stub"}));
}

std::shared_ptr<VlmGateway> make_gateway(const Config& c) {
  return std::make_shared<VlmGateway>(make_vlm_adapter(c), vlm_config(c));
}

std::shared_ptr<VideoBackend> pick_backend(const BackendMap& backends, const std::string& id) {
  const auto it = backends.find(id);
  if (it != backends.end()) return it->second;
  std::string known;
  for (const auto& [k, v] : backends) known += (known.empty() ? "" : ", ") + k;
  throw InvalidArgument("unknown backend '" + id + "' (configured: " + known + ")");
}

struct EditArgs {
  std::string image, prompt, select = "auto", backend, temporal_caption, job_id;
  std::int64_t seed = 0;
  bool raw_caption = false;
};

int cmd_edit(const Common& common, const EditArgs& a) {
  const auto cfg = common.load();
  JobStore store(store_root(cfg));
  VideoEngine engine(cache_root(cfg));
  const auto backends = make_backends(cfg);
  const auto backend = pick_backend(backends, a.backend.empty() ? default_backend(cfg) : a.backend);

  EditTask task;
  task.source_image = read_image(a.image);
  task.source_path = a.image;
  task.target_caption = a.prompt;
  task.id = fs::path(a.image).stem().string();
  std::erase_if(task.id, [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_'; });
  if (task.id.empty()) task.id = "edit";

  EditOptions o;
  o.seed = a.seed;
  o.select = SelectSpec::parse(a.select);
  o.raw_caption = a.raw_caption;
  o.job_id = a.job_id;
  if (!a.temporal_caption.empty()) o.caption_override = a.temporal_caption;

  const bool needs_vlm = o.select.method == SelectionMethod::automatic || (!o.raw_caption && !o.caption_override);
  EditPipeline pipeline(store, engine, needs_vlm ? make_gateway(cfg) : nullptr, pipeline_config(cfg));
  const auto out = pipeline.run(task, *backend, o, [](JobState s) { std::cerr << "stage: " << to_string(s) << '\n'; });
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "temporal caption: " << out.caption.text << '\n'
            << "selected frame: " << out.selection.frame_index << " of " << out.frame_count << " ("
            << to_string(out.selection.method) << (out.cache_hit ? ", cached video" : "") << ")\n";
  std::cout << (out.job_dir / "result.png").string() << '\n';
  return 0;
}

struct EvalArgs {
  std::string manifest, select = "auto", providers = "stub", out, backend, arm, seed_list;
  int seeds = 15;
  int workers = 1;
  bool raw_caption = false;
  bool lenient = false;
};

int cmd_eval(const Common& common, const EvalArgs& a) {
  auto cfg = common.load();
  if (common.store.empty() && !cfg.get("store.root")) cfg.set("store.root", a.out);
  const auto tasks = load_manifest(a.manifest, {.strict_aspect = !a.lenient});
  JobStore store(store_root(cfg));
  VideoEngine engine(cache_root(cfg));
  const auto backends = make_backends(cfg);
  const auto backend = pick_backend(backends, a.backend.empty() ? default_backend(cfg) : a.backend);
  const auto providers = make_providers(a.providers, cfg);

  ProtocolConfig pc;
  if (!a.seed_list.empty()) {
    pc.seeds.clear();
    for (const auto& s : split(a.seed_list, ',')) pc.seeds.push_back(std::stoll(std::string(trim(s))));
  } else {
    pc.seeds = default_seeds(a.seeds);
  }
  const auto select = SelectSpec::parse(a.select);
  if (select.method == SelectionMethod::manual) throw InvalidArgument("eval supports --select auto or last");
  pc.selection_mode = select.method;
  pc.arm = a.arm.empty() ? std::string(a.raw_caption ? "original" : "temporal") + "/" + a.select : a.arm;
  pc.run_dir = fs::path(a.out) / "runs" / arm_slug(pc.arm);
  pc.workers = a.workers;

  const bool needs_vlm = select.method == SelectionMethod::automatic || !a.raw_caption;
  EditPipeline pipeline(store, engine, needs_vlm ? make_gateway(cfg) : nullptr, pipeline_config(cfg));
  const auto slug = arm_slug(pc.arm);
  const EditFn fn = [&](const EditTask& t, std::int64_t seed) {
    EditOptions o;
    o.seed = seed;
    o.select = select;
    o.raw_caption = a.raw_caption;
    o.job_id = slug + "--" + t.id + "--s" + std::to_string(seed);
    if (o.job_id.size() > 128) o.job_id = derive_job_id(t, o, backend->id());
    return pipeline.run(t, *backend, o).result;
  };
  const auto result = run_protocol(tasks, fn, pc, *providers);
  std::vector<SummaryRow> rows{result.summary};
  if (result.gt_reference) rows.push_back(*result.gt_reference);
  std::cout << format_summary_text(rows);
  std::cerr << "records: " << result.records.size() << " (" << result.executed << " run, " << result.reused
            << " reused), failed: " << result.failures << ", run dir: " << pc.run_dir.string() << '\n';
  return 0;
}

struct PoseArgs {
  std::string corpus, spec, out;
};

int cmd_posedit(const PoseArgs& a) {
  const auto spec = PoseEditSpec::load(a.spec);
  const auto build = build_posedit(a.corpus, spec, a.out);
  std::cerr << build.tasks.size() << " tasks, " << build.warnings.size() << " cells skipped\n";
  std::cout << build.manifest.string() << '\n';
  return 0;
}

struct ManifoldArgs {
  std::vector<std::string> sets;
  std::string path, out, providers = "stub";
  int noise = 25;
  int noise_size = 512;
  std::uint64_t seed = 0;
};

int cmd_manifold(const Common& common, const ManifoldArgs& a) {
  const auto cfg = common.load();
  const auto providers = make_providers(a.providers, cfg);
  std::vector<EmbeddingSet> sets;
  for (const auto& dir : a.sets) {
    const auto loaded = load_image_dir(dir);
    std::vector<Image> images;
    std::vector<std::string> names;
    for (const auto& [n, img] : loaded) {
      names.push_back(n);
      images.push_back(img);
    }
    sets.push_back(embed_set(fs::path(dir).filename().string(), images, *providers, names));
  }
  if (a.noise > 0) {
    const auto noise = noise_images(a.noise, a.noise_size, a.seed);
    sets.push_back(embed_set("noise", noise, *providers));
  }
  const auto model = fit_pca(sets);
  Eigen::MatrixXd path;
  if (!a.path.empty()) {
    const bool job = fs::is_directory(fs::path(a.path) / "video");
    std::vector<Image> frames;
    for (const auto& [n, img] : load_image_dir(a.path)) frames.push_back(job ? postprocess(img) : img);
    path = embed_set("path", frames, *providers).vectors;
  }
  export_plot_data(model, sets, path, a.out);
  std::cerr << "explained variance: " << model.explained_variance[0] << ", " << model.explained_variance[1]
            << " of " << model.total_variance << '\n';
  std::cout << a.out << '\n';
  return 0;
}

struct ServeArgs {
  int port = -1;
  std::string host;
};

int cmd_serve(const Common& common, const ServeArgs& a) {
  const auto cfg = common.load();
  auto opts = service_options(cfg);
  if (a.port >= 0) opts.port = a.port;
  if (!a.host.empty()) opts.host = a.host;
  JobStore store(store_root(cfg));
  VideoEngine engine(cache_root(cfg));
  auto backends = make_backends(cfg);
  const auto def = default_backend(cfg);
  pick_backend(backends, def);

  // Handle SIGINT/SIGTERM synchronously on this thread; workers inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  EditService service(store, engine, make_gateway(cfg), std::move(backends), def, pipeline_config(cfg), opts);
  const int port = service.start();
  std::cerr << "listening on " << opts.host << ":" << port << '\n';
  std::cout << port << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "shutting down\n";
  service.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"f2f: image editing through generated video"};
  app.require_subcommand(1);
  Common common;

  EditArgs edit;
  auto* e = app.add_subcommand("edit", "edit one image");
  add_common(e, common);
  e->add_option("--image", edit.image, "source image")->required()->check(CLI::ExistingFile);
  e->add_option("--prompt", edit.prompt, "target caption")->required();
  e->add_option("--seed", edit.seed, "generation seed");
  e->add_option("--select", edit.select, "auto | last | frame:K");
  e->add_option("--backend", edit.backend, "video backend id");
  e->add_flag("--raw-caption", edit.raw_caption, "use the prompt as the temporal caption");
  e->add_option("--temporal-caption", edit.temporal_caption, "temporal caption to use verbatim");
  e->add_option("--job-id", edit.job_id, "job directory name");

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "run the benchmark protocol over a manifest");
  add_common(v, common);
  v->add_option("--manifest", ev.manifest)->required()->check(CLI::ExistingFile);
  v->add_option("--seeds", ev.seeds, "number of seeds (0..N-1)")->check(CLI::PositiveNumber);
  v->add_option("--seed-list", ev.seed_list, "explicit comma-separated seeds");
  v->add_option("--select", ev.select, "auto | last")->check(CLI::IsMember({"auto", "last"}));
  v->add_flag("--raw-caption", ev.raw_caption, "ablation: original captions instead of temporal captions");
  v->add_option("--providers", ev.providers, "stub | reference")->check(CLI::IsMember({"stub", "reference"}));
  v->add_option("--out", ev.out, "output directory")->required();
  v->add_option("--backend", ev.backend, "video backend id");
  v->add_option("--arm", ev.arm, "label for this configuration");
  v->add_option("--workers", ev.workers)->check(CLI::PositiveNumber);
  v->add_flag("--lenient-aspect", ev.lenient, "warn instead of failing on gt aspect mismatch");

  PoseArgs pose;
  auto* p = app.add_subcommand("posedit", "pose benchmark tooling");
  p->require_subcommand(1);
  auto* pb = p->add_subcommand("build", "build a manifest from an action-clip corpus");
  add_common(pb, common);
  pb->add_option("--corpus", pose.corpus)->required()->check(CLI::ExistingDirectory);
  pb->add_option("--spec", pose.spec)->required()->check(CLI::ExistingFile);
  pb->add_option("--out", pose.out)->required();

  ManifoldArgs mf;
  auto* m = app.add_subcommand("manifold", "PCA projection of image sets and an edit path");
  add_common(m, common);
  m->add_option("--sets", mf.sets, "image directories")->required()->expected(1, -1);
  m->add_option("--noise", mf.noise, "number of noise anchor images")->check(CLI::NonNegativeNumber);
  m->add_option("--noise-size", mf.noise_size)->check(CLI::PositiveNumber);
  m->add_option("--seed", mf.seed, "noise seed");
  m->add_option("--path", mf.path, "job directory or image directory traced as a path");
  m->add_option("--out", mf.out, "CSV output")->required();
  m->add_option("--providers", mf.providers)->check(CLI::IsMember({"stub", "reference"}));

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "run the HTTP service");
  add_common(s, common);
  s->add_option("--port", serve.port)->check(CLI::Range(0, 65535));
  s->add_option("--host", serve.host);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUsage;
  }

  try {
    if (*e) return cmd_edit(common, edit);
    if (*v) return cmd_eval(common, ev);
    if (*pb) return cmd_posedit(pose);
    if (*m) return cmd_manifold(common, mf);
    if (*s) return cmd_serve(common, serve);
  } catch (const InvalidArgument& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
