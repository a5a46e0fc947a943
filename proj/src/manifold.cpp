// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/manifold.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "f2f/error.hpp"
#include "f2f/fs_util.hpp"
#include "f2f/hash.hpp"
#include "f2f/image_io.hpp"

namespace f2f {

namespace fs = std::filesystem;

EmbeddingSet embed_set(std::string label, std::span<const Image> images, MetricProviders& providers,
                       std::span<const std::string> names) {
  if (images.empty()) throw InvalidArgument("embedding set " + label + " is empty");
  EmbeddingSet set{std::move(label), {}};
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto name = i < names.size() ? names[i] : "#" + std::to_string(i);
    std::vector<double> e;
    try {
      e = l2_normalize(providers.image_embed(images[i]));
    } catch (const std::exception& ex) {
      throw Error("embedding image " + name + " of set " + set.label + " failed: " + ex.what());
    }
    if (i == 0) set.vectors.resize(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(e.size()));
    if (static_cast<Eigen::Index>(e.size()) != set.vectors.cols())
      throw IntegrityError("image " + name + " embedded to a different dimension");
    set.vectors.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(e.data(), set.vectors.cols());
  }
  return set;
}

std::vector<Image> noise_images(int count, int size, std::uint64_t seed) {
  if (count < 0 || size < 1) throw InvalidArgument("bad noise image request");
  std::mt19937_64 rng(seed);
  std::vector<Image> out;
  for (int i = 0; i < count; ++i) {
    Image img(size, size);
    for (auto& b : img.data()) b = static_cast<std::uint8_t>(rng() >> 56);
    out.push_back(std::move(img));
  }
  return out;
}

PcaModel fit_pca(std::span<const EmbeddingSet> sets) {
  Eigen::Index rows = 0, dim = -1;
  for (const auto& s : sets) {
    if (dim >= 0 && s.dim() != dim) throw InvalidArgument("embedding sets differ in dimension");
    dim = s.dim();
    rows += s.size();
  }
  if (rows < 3) throw InvalidArgument("PCA needs at least 3 rows, got " + std::to_string(rows));
  if (dim < 2) throw InvalidArgument("PCA needs at least 2 dimensions");

  Eigen::MatrixXd x(rows, dim);
  Eigen::Index r = 0;
  for (const auto& s : sets) {
    x.middleRows(r, s.size()) = s.vectors;
    r += s.size();
  }
  PcaModel m;
  m.mean = x.colwise().mean().transpose();
  x.rowwise() -= m.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() < 2 || sv(0) == 0.0 || sv(1) <= sv(0) * 1e-12)
    throw InvalidArgument("embeddings have rank < 2 after centring");

  const double denom = static_cast<double>(rows - 1);
  m.components = svd.matrixV().leftCols(2).transpose();
  for (int k = 0; k < 2; ++k) {
    Eigen::Index arg = 0;
    m.components.row(k).cwiseAbs().maxCoeff(&arg);
    if (m.components(k, arg) < 0) m.components.row(k) *= -1.0;
    m.explained_variance[static_cast<std::size_t>(k)] = sv(k) * sv(k) / denom;
  }
  m.total_variance = x.squaredNorm() / denom;
  double rest = 0.0;
  for (Eigen::Index k = 2; k < sv.size(); ++k) rest += sv(k) * sv(k);
  m.residual_variance = rest / denom;
  return m;
}

Eigen::MatrixX2d project(const PcaModel& model, const Eigen::MatrixXd& vectors) {
  if (vectors.cols() != model.mean.size())
    throw InvalidArgument("vector dimension " + std::to_string(vectors.cols()) + " does not match model dimension " +
                          std::to_string(model.mean.size()));
  return (vectors.rowwise() - model.mean.transpose()) * model.components.transpose();
}

std::vector<double> cumulative_arc_length(const Eigen::MatrixX2d& points) {
  std::vector<double> out;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (i > 0) acc += (points.row(i) - points.row(i - 1)).norm();
    out.push_back(acc);
  }
  return out;
}

std::string format_plot_data(const PcaModel& model, std::span<const EmbeddingSet> sets,
                             const Eigen::MatrixXd& path_points, const std::string& path_label) {
  std::ostringstream os;
  os << "kind,label,index,x,y\n";
  auto rows = [&](const char* kind, const std::string& label, const Eigen::MatrixX2d& p) {
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      os << kind << ',' << label << ',' << i << ',' << format_real(p(i, 0)) << ',' << format_real(p(i, 1)) << '\n';
  };
  for (const auto& s : sets) rows("set", s.label, project(model, s.vectors));
  if (path_points.rows() > 0) rows("path", path_label, project(model, path_points));
  return os.str();
}

void export_plot_data(const PcaModel& model, std::span<const EmbeddingSet> sets, const Eigen::MatrixXd& path_points,
                      const fs::path& out, const std::string& path_label) {
  for (const auto& s : sets)
    if (s.label.find_first_of(",\n\"") != std::string::npos)
      throw InvalidArgument("set label '" + s.label + "' contains a delimiter");
  write_file_atomic(out, format_plot_data(model, sets, path_points, path_label));
}

std::vector<std::pair<std::string, Image>> load_image_dir(const fs::path& dir) {
  auto root = dir;
  if (fs::is_directory(dir / "video")) root = dir / "video";
  if (!fs::is_directory(root)) throw NotFound("image directory " + dir.string() + " does not exist");
  static const std::set<std::string> ext{".png", ".jpg", ".jpeg", ".bmp"};
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_regular_file() && ext.contains(e.path().extension().string())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, Image>> out;
  for (const auto& f : files) out.emplace_back(f.filename().string(), read_image(f));
  if (out.empty()) throw InvalidArgument("no images in " + root.string());
  return out;
}

}  // namespace f2f
