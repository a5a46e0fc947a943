// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "f2f/image.hpp"
#include "f2f/metrics.hpp"

namespace f2f {

/// N x D matrix of unit-norm embeddings, one row per image.
struct EmbeddingSet {
  std::string label;
  Eigen::MatrixXd vectors;

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
};

// Throws with the offending image's name (or index) when the provider fails.
EmbeddingSet embed_set(std::string label, std::span<const Image> images, MetricProviders& providers,
                       std::span<const std::string> names = {});

// Uniform i.i.d. RGB noise images.
std::vector<Image> noise_images(int count, int size = 512, std::uint64_t seed = 0);

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::Matrix<double, 2, Eigen::Dynamic> components;  // rows orthonormal
  std::array<double, 2> explained_variance{};           // descending, sample variance (N-1)
  double total_variance = 0.0;
  double residual_variance = 0.0;  // variance outside the top-2 subspace
};

// Stacks all sets, centres, keeps the top two right singular vectors. Each
// component is signed so its largest-magnitude coordinate is positive.
// Throws InvalidArgument for < 3 rows, mixed dimensions or rank < 2.
PcaModel fit_pca(std::span<const EmbeddingSet> sets);

// (v - mean) * components^T, one row per input row.
Eigen::MatrixX2d project(const PcaModel& model, const Eigen::MatrixXd& vectors);

// Cumulative polyline length after each point (first entry 0).
std::vector<double> cumulative_arc_length(const Eigen::MatrixX2d& points);

// CSV "kind,label,index,x,y": set rows in set order, then path rows.
std::string format_plot_data(const PcaModel& model, std::span<const EmbeddingSet> sets,
                             const Eigen::MatrixXd& path_points, const std::string& path_label = "path");
void export_plot_data(const PcaModel& model, std::span<const EmbeddingSet> sets, const Eigen::MatrixXd& path_points,
                      const std::filesystem::path& out, const std::string& path_label = "path");

// Images in a directory (sorted by name) or the video frames of a job directory.
std::vector<std::pair<std::string, Image>> load_image_dir(const std::filesystem::path& dir);

}  // namespace f2f
