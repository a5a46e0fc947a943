// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "f2f/config.hpp"
#include "f2f/error.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"
#include "f2f/manifest.hpp"
#include "f2f/manifold.hpp"
#include "f2f/metrics.hpp"
#include "f2f/pipeline.hpp"
#include "f2f/prompts.hpp"
#include "f2f/reply_parser.hpp"
#include "f2f/selector.hpp"
#include "f2f/video.hpp"

namespace py = pybind11;
using namespace f2f;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Image to_image(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InvalidArgument("expected an H x W x 3 uint8 array");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> px(a.data(), a.data() + a.size());
  return Image(w, h, std::move(px));
}

U8Array to_array(const Image& img) {
  U8Array out({img.height(), img.width(), 3});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

py::dict selection_dict(const FrameSelection& s) {
  py::dict d;
  d["frame_index"] = s.frame_index;
  d["method"] = std::string(to_string(s.method));
  d["identifier"] = s.identifier ? py::cast(*s.identifier) : py::none();
  d["fallback"] = s.fallback;
  d["vlm_reply"] = s.vlm_reply ? py::cast(*s.vlm_reply) : py::none();
  return d;
}

py::dict edit(const std::string& image, const std::string& prompt, const std::string& store, std::int64_t seed,
              const std::string& select, bool raw_caption, const std::string& vlm, int stub_selection,
              const std::string& config) {
  auto cfg = config.empty() ? Config{} : Config::load(config);
  cfg.set("store.root", store);
  cfg.set("vlm.adapter", vlm);
  cfg.set("vlm.stub_selection", std::to_string(stub_selection));
  JobStore js(store_root(cfg));
  VideoEngine engine(cache_root(cfg));
  const auto backends = make_backends(cfg);
  const auto backend = backends.at(default_backend(cfg));
  auto gateway = std::make_shared<VlmGateway>(make_vlm_adapter(cfg), vlm_config(cfg));
  EditPipeline pipeline(js, engine, gateway, pipeline_config(cfg));

  EditTask task;
  task.id = "py";
  task.source_image = read_image(image);
  task.target_caption = prompt;
  EditOptions o;
  o.seed = seed;
  o.select = SelectSpec::parse(select);
  o.raw_caption = raw_caption;
  EditOutcome out;
  {
    py::gil_scoped_release release;
    out = pipeline.run(task, *backend, o);
  }
  py::dict d;
  d["job_id"] = out.job_id;
  d["job_dir"] = out.job_dir;
  d["result_path"] = out.job_dir / "result.png";
  d["temporal_caption"] = out.caption.text;
  d["frame_count"] = out.frame_count;
  d["cache_hit"] = out.cache_hit;
  d["selection"] = selection_dict(out.selection);
  return d;
}

}  // namespace

PYBIND11_MODULE(_f2f, m) {
  m.doc() = "Image editing through generated video: geometry, selection, metrics and PCA helpers.";

  // Leaked on purpose: the module object outlives every translator call.
  static py::handle error_type = py::exception<Error>(m, "Error").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      py::set_error(PyExc_ValueError, e.what());
    } catch (const SelectionParseError& e) {
      py::set_error(PyExc_ValueError, e.what());
    } catch (const NotFound& e) {
      py::set_error(PyExc_FileNotFoundError, e.what());
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  m.def("read_image", [](const std::filesystem::path& p) { return to_array(read_image(p)); }, py::arg("path"));
  m.def("write_png", [](const U8Array& a, const std::filesystem::path& p) { write_png(to_image(a), p); },
        py::arg("image"), py::arg("path"));
  m.def("pixel_digest", [](const U8Array& a) { return pixel_digest(to_image(a)); }, py::arg("image"));

  m.def("preprocess", [](const U8Array& a) { return to_array(preprocess(to_image(a)).image); }, py::arg("source"),
        "Square-resize to 480 and pad to the 720x480 canvas.");
  m.def("postprocess", [](const U8Array& a) { return to_array(postprocess(to_image(a))); }, py::arg("frame"),
        "Crop the inner 480x480 region and resize to 512x512.");

  m.def("sampled_indices", &sampled_indices, py::arg("frame_count"), py::arg("stride") = kDefaultStride);
  m.def("parse_selection_reply", &parse_selection_reply, py::arg("reply"), py::arg("num_choices"));
  m.def("caption_instruction", &prompts::caption_instruction, py::arg("target_caption"));
  m.def("selection_instruction", &prompts::selection_instruction, py::arg("target_caption"),
        py::arg("num_choices") = 12);
  m.def(
      "collage_digest",
      [](const U8Array& source, const std::vector<U8Array>& frames, int stride) {
        VideoSequence v;
        for (const auto& f : frames) v.frames.push_back(to_image(f));
        return build_collage(to_image(source), sample_frames(v, stride)).digest();
      },
      py::arg("source"), py::arg("frames"), py::arg("stride") = kDefaultStride);

  m.def(
      "cache_key",
      [](const std::string& digest, const std::string& caption, double guidance, int frames, int steps, int fps,
         std::int64_t seed) { return cache_key(digest, caption, {guidance, frames, steps, fps}, seed); },
      py::arg("source_digest"), py::arg("caption"), py::arg("guidance_scale") = 6.0, py::arg("num_frames") = 49,
      py::arg("num_inference_steps") = 50, py::arg("fps") = 8, py::arg("seed") = 0);

  m.def("stub_perceptual", [](const U8Array& a, const U8Array& b) {
    StubProviders p;
    return p.perceptual(to_image(a), to_image(b));
  });
  m.def("stub_image_embed", [](const U8Array& a) {
    StubProviders p;
    return p.image_embed(to_image(a));
  });
  m.def("stub_image_similarity", [](const U8Array& a, const U8Array& b) {
    StubProviders p;
    return image_similarity(to_image(a), to_image(b), p);
  });
  m.def("stub_text_image_score", [](const U8Array& a, const std::string& caption) {
    StubProviders p;
    return text_image_score(to_image(a), caption, p);
  });

  m.def(
      "fit_pca",
      [](const std::vector<Eigen::MatrixXd>& sets) {
        std::vector<EmbeddingSet> es;
        for (std::size_t i = 0; i < sets.size(); ++i) es.push_back({"set" + std::to_string(i), sets[i]});
        const auto model = fit_pca(es);
        py::dict d;
        d["mean"] = Eigen::VectorXd(model.mean);
        d["components"] = Eigen::MatrixXd(model.components);
        d["explained_variance"] = model.explained_variance;
        d["residual_variance"] = model.residual_variance;
        return d;
      },
      py::arg("sets"), "Top-2 PCA of the stacked row vectors.");

  m.def(
      "load_manifest",
      [](const std::filesystem::path& p) {
        py::list out;
        for (const auto& t : load_manifest(p)) {
          py::dict d;
          d["id"] = t.id;
          d["prompt"] = t.target_caption;
          d["source"] = t.source_path;
          d["gt_target"] = t.gt_target_path ? py::cast(*t.gt_target_path) : py::none();
          d["category"] = t.category ? py::cast(*t.category) : py::none();
          d["temporal_caption"] = t.temporal_caption ? py::cast(t.temporal_caption->text) : py::none();
          out.append(d);
        }
        return out;
      },
      py::arg("path"));

  m.def("edit", &edit, py::arg("image"), py::arg("prompt"), py::arg("store"), py::arg("seed") = 0,
        py::arg("select") = "auto", py::arg("raw_caption") = false, py::arg("vlm") = "stub",
        py::arg("stub_selection") = 7, py::arg("config") = "",
        "Run caption -> generate -> select on the mock backend (or the configured one) and return the job summary.");

  m.attr("DEFAULT_STRIDE") = kDefaultStride;
}
