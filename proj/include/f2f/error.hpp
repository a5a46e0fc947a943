// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace f2f {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument that violates a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// Operation not allowed in the object's current state.
class StateConflict : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Filesystem failure; carries the offending path.
class IoError : public Error {
 public:
  IoError(const std::string& what, std::filesystem::path path)
      : Error(what + ": " + path.string()), path_(std::move(path)) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Data produced by an external component does not satisfy its contract.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A remote call failed in a way that may succeed if repeated.
class RetryableError : public Error {
 public:
  RetryableError(const std::string& what, int status = 0) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Retries were used up; `status()` is the last HTTP status seen (0 for transport errors).
class RetriesExhausted : public RetryableError {
 public:
  RetriesExhausted(const std::string& what, int status, int attempts)
      : RetryableError(what, status), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// A remote call failed in a way that repeating will not fix.
class FatalError : public Error {
 public:
  FatalError(const std::string& what, int status = 0) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class CaptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace f2f
