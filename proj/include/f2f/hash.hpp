// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace f2f {

/// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> bytes);
  Sha256& update(std::string_view text);
  std::array<std::uint8_t, 32> finish();
  std::string finish_hex();

 private:
  void* ctx_;
};

std::string sha256_hex(std::string_view data);
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string to_hex(std::span<const std::uint8_t> bytes);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

/// Builds the frozen `key=value` line serialization digested for cache keys
/// and prompt digests. See docs/formats.md.
class CanonicalWriter {
 public:
  explicit CanonicalWriter(std::string_view domain);

  CanonicalWriter& field(std::string_view key, std::string_view text);
  CanonicalWriter& field(std::string_view key, std::int64_t value);
  CanonicalWriter& field(std::string_view key, double value);

  const std::string& str() const { return buf_; }
  std::string digest() const { return sha256_hex(buf_); }

 private:
  std::string buf_;
};

// Shortest decimal representation that round-trips.
std::string format_real(double value);

}  // namespace f2f
