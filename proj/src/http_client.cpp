// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include "f2f/http_client.hpp"

#include <httplib.h>

#include <regex>

#include "f2f/error.hpp"

namespace f2f::http {

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

Url parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw InvalidArgument("invalid URL '" + url + "'");
  Url u;
  u.scheme = m[1].str();
  for (auto& c : u.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  u.host = m[2].str();
  u.port = m[3].matched ? std::stoi(m[3].str()) : (u.scheme == "https" ? 443 : 80);
  u.path = m[4].matched ? m[4].str() : "";
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

std::string join(const std::string& base, const std::string& path) {
  std::string b = base;
  while (!b.empty() && b.back() == '/') b.pop_back();
  std::string p = path;
  while (!p.empty() && p.front() == '/') p.erase(p.begin());
  return b + "/" + p;
}

bool is_retryable_status(int status) { return status == 408 || status == 425 || status == 429 || status >= 500; }

namespace {

template <typename Fn>
Response send(const std::string& url, std::chrono::milliseconds timeout, Fn&& fn) {
  const auto u = parse_url(url);
  httplib::Client client(u.origin());
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_follow_location(true);
  const std::string path = u.path.empty() ? "/" : u.path;
  auto res = fn(client, path);
  if (!res) throw RetryableError("HTTP transport error for " + url + ": " + httplib::to_string(res.error()), 0);
  Response out;
  out.status = res->status;
  out.body = std::move(res->body);
  out.content_type = res->get_header_value("Content-Type");
  return out;
}

httplib::Headers to_httplib(const Headers& h) { return httplib::Headers(h.begin(), h.end()); }

}  // namespace

Response post(const std::string& url, const std::string& body, const std::string& content_type,
              const Headers& headers, std::chrono::milliseconds timeout) {
  return send(url, timeout, [&](httplib::Client& c, const std::string& path) {
    return c.Post(path, to_httplib(headers), body, content_type);
  });
}

Response get(const std::string& url, const Headers& headers, std::chrono::milliseconds timeout) {
  return send(url, timeout,
              [&](httplib::Client& c, const std::string& path) { return c.Get(path, to_httplib(headers)); });
}

}  // namespace f2f::http
