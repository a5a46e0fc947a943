// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <string>

namespace f2f::http {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // without trailing slash, may be empty

  std::string origin() const;
};

Url parse_url(const std::string& url);
// Joins a base URL and a path segment with exactly one slash.
std::string join(const std::string& base, const std::string& path);

struct Response {
  int status = 0;
  std::string body;
  std::string content_type;
};

using Headers = std::multimap<std::string, std::string>;

// Transport failures (refused connection, timeout) throw RetryableError with status 0.
Response post(const std::string& url, const std::string& body, const std::string& content_type,
              const Headers& headers, std::chrono::milliseconds timeout);
Response get(const std::string& url, const Headers& headers, std::chrono::milliseconds timeout);

// 408, 425, 429 and 5xx.
bool is_retryable_status(int status);

}  // namespace f2f::http
