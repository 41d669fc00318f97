// Copyright 2026 The sevsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sevsim/keyserver_http.hpp"

#include <httplib.h>

#include <charconv>

namespace sevsim::keyserver {
namespace {

std::optional<std::uint32_t> parse_u32(const std::string& text) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

void reply_cert(httplib::Response& res, const Certificate& cert) {
  res.status = 200;
  res.set_content(to_hex(cert.serialize()), "text/plain");
}

void reply_error(httplib::Response& res, int status, const std::string& msg) {
  res.status = status;
  res.set_content(msg, "text/plain");
}

}  // namespace

HttpFacade::HttpFacade(KeyServer& server)
    : server_(server), http_(std::make_unique<httplib::Server>()) {
  http_->Get("/ark", [this](const httplib::Request&, httplib::Response& res) {
    reply_cert(res, server_.get_root_certs().first);
  });
  http_->Get("/ask", [this](const httplib::Request&, httplib::Response& res) {
    reply_cert(res, server_.get_root_certs().second);
  });
  http_->Get("/cek", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("platform_id")) return reply_error(res, 400, "missing platform_id");
    PlatformId id{};
    try {
      Bytes raw = from_hex(req.get_param_value("platform_id"));
      if (raw.size() != id.size()) return reply_error(res, 400, "platform_id must be 32 bytes");
      std::copy(raw.begin(), raw.end(), id.begin());
    } catch (const Error&) {
      return reply_error(res, 400, "platform_id is not hex");
    }
    bool has_pv = req.has_param("pv");
    bool has_sv = req.has_param("sv");
    if (has_pv != has_sv) return reply_error(res, 400, "pv and sv must be given together");
    try {
      if (!has_pv) return reply_cert(res, server_.get_cek_certificate_baseline(id));
      auto pv = parse_u32(req.get_param_value("pv"));
      auto sv = parse_u32(req.get_param_value("sv"));
      if (!pv || !sv) return reply_error(res, 400, "pv/sv must be non-negative integers");
      reply_cert(res, server_.get_cek_certificate_enhanced(id, *pv, *sv));
    } catch (const Error& e) {
      reply_error(res, e.code() == ErrorCode::kRevoked ? 410 : 404, e.what());
    }
  });
  http_->Post("/revoke", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("kind") || !req.has_param("version")) {
      return reply_error(res, 400, "kind and version are required");
    }
    const std::string kind = req.get_param_value("kind");
    auto version = parse_u32(req.get_param_value("version"));
    if (!version || (kind != "pspos" && kind != "sevfw")) {
      return reply_error(res, 400, "kind must be pspos|sevfw and version an integer");
    }
    server_.revoke_firmware(firmware::kind_from_string(kind), *version);
    res.status = 204;
  });
}

HttpFacade::~HttpFacade() { stop(); }

int HttpFacade::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = http_->bind_to_any_port(host);
  } else {
    port_ = http_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw Error(ErrorCode::kIo, "cannot bind key server facade to " + host);
  host_ = host;
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port_;
}

void HttpFacade::stop() {
  if (thread_.joinable()) {
    http_->stop();
    thread_.join();
  }
}

HttpKeyServerClient::HttpKeyServerClient(std::string host, int port)
    : host_(std::move(host)), port_(port) {}

Certificate HttpKeyServerClient::fetch(const std::string& path) {
  httplib::Client cli(host_, port_);
  auto res = cli.Get(path);
  if (!res) throw Error(ErrorCode::kIo, "key server unreachable at " + host_);
  switch (res->status) {
    case 200: return Certificate::deserialize(from_hex(res->body));
    case 404: throw Error(ErrorCode::kNotFound, res->body);
    case 410: throw Error(ErrorCode::kRevoked, res->body);
    default: throw Error(ErrorCode::kIo, "key server returned HTTP " + std::to_string(res->status));
  }
}

std::pair<Certificate, Certificate> HttpKeyServerClient::root_certs() {
  return {fetch("/ark"), fetch("/ask")};
}

Certificate HttpKeyServerClient::cek_certificate(const PlatformId& id,
                                                 std::optional<certs::VersionInfo> versions) {
  std::string path = "/cek?platform_id=" + to_hex(id);
  if (versions) {
    path += "&pv=" + std::to_string(versions->psp_os_version) +
            "&sv=" + std::to_string(versions->sev_fw_version);
  }
  return fetch(path);
}

void HttpKeyServerClient::revoke(firmware::FirmwareKind kind, std::uint32_t version) {
  httplib::Client cli(host_, port_);
  std::string path = std::string("/revoke?kind=") +
                     (kind == firmware::FirmwareKind::kPspOs ? "pspos" : "sevfw") +
                     "&version=" + std::to_string(version);
  auto res = cli.Post(path);
  if (!res || res->status != 204) throw Error(ErrorCode::kIo, "revocation request failed");
}

std::pair<std::string, int> parse_address(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::kConfig, "key server address must be host:port, got '" + addr + "'");
  }
  auto port = parse_u32(addr.substr(colon + 1));
  if (!port || *port > 65535) throw Error(ErrorCode::kConfig, "invalid port in '" + addr + "'");
  return {addr.substr(0, colon), static_cast<int>(*port)};
}

}  // namespace sevsim::keyserver
