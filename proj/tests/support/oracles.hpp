// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

// Reference computations written independently of the library code paths
// they check: long-double accumulation, integer luma sums, Jacobi eigensolver.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "f2f/hash.hpp"
#include "f2f/image.hpp"
#include "f2f/text.hpp"

namespace f2f::testing {

using LVec = std::vector<long double>;

// 8x8 area-averaged luma, L2-normalised. Luma is summed as an integer
// 299 r + 587 g + 114 b so no floating error enters before the division.
inline LVec oracle_grid_embedding(const Image& img) {
  const long long w = img.width(), h = img.height();
  LVec v(64);
  for (int gy = 0; gy < 8; ++gy) {
    long long y0 = gy * h / 8, y1 = (gy + 1) * h / 8;
    if (y1 <= y0) y1 = y0 + 1;
    y1 = std::min(y1, h);
    for (int gx = 0; gx < 8; ++gx) {
      long long x0 = gx * w / 8, x1 = (gx + 1) * w / 8;
      if (x1 <= x0) x1 = x0 + 1;
      x1 = std::min(x1, w);
      long long sum = 0;
      for (long long y = y0; y < y1; ++y)
        for (long long x = x0; x < x1; ++x) {
          const auto c = img.at(static_cast<int>(x), static_cast<int>(y));
          sum += 299LL * c[0] + 587LL * c[1] + 114LL * c[2];
        }
      v[static_cast<std::size_t>(gy * 8 + gx)] =
          static_cast<long double>(sum) / 1000.0L / static_cast<long double>((y1 - y0) * (x1 - x0));
    }
  }
  long double n2 = 0;
  for (auto x : v) n2 += x * x;
  if (n2 == 0) return LVec(64, 0.125L);
  const long double n = std::sqrt(n2);
  for (auto& x : v) x /= n;
  return v;
}

inline LVec oracle_text_embedding(const std::string& text) {
  const auto key = normalize_whitespace(text);
  const auto d = Sha256().update("f2f.stub.text.v1\n").update(key).finish();
  std::uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | d[static_cast<std::size_t>(i)];  // little-endian bytes
  std::mt19937_64 rng(seed);
  LVec v(64);
  for (auto& x : v) x = static_cast<long double>(rng() >> 11) / 9007199254740992.0L - 0.5L;
  long double n2 = 0;
  for (auto x : v) n2 += x * x;
  for (auto& x : v) x /= std::sqrt(n2);
  return v;
}

inline long double oracle_cosine(const LVec& a, const LVec& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
// eigenvalues (descending) and the matching eigenvectors as columns.
inline void jacobi_eigen(Eigen::MatrixXd a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) > a(y, y); });
  values.resize(n);
  vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
}

// Largest principal angle (radians) between the row spaces of two 2xD
// orthonormal bases, via sin = ||(I - P_a) B^T||_2.
inline double max_principal_angle(const Eigen::MatrixXd& a_rows, const Eigen::MatrixXd& b_rows) {
  const Eigen::MatrixXd qa = a_rows.transpose();  // D x 2, orthonormal columns
  const Eigen::MatrixXd qb = b_rows.transpose();
  const Eigen::MatrixXd resid = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

}  // namespace f2f::testing
