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

// Local HTTP facade over KeyServer.
//
//   GET  /ark
//   GET  /ask
//   GET  /cek?platform_id=<hex>[&pv=<int>&sv=<int>]
//   POST /revoke?kind=<pspos|sevfw>&version=<int>
//
// Certificates are returned as hex of their canonical bytes. Unknown
// platforms map to 404, revoked versions to 410, bad parameters to 400.

#ifndef SEVSIM_KEYSERVER_HTTP_HPP_
#define SEVSIM_KEYSERVER_HTTP_HPP_

#include <memory>
#include <string>
#include <thread>

#include "sevsim/keyserver.hpp"

namespace httplib {
class Server;
}

namespace sevsim::keyserver {

class HttpFacade {
 public:
  explicit HttpFacade(KeyServer& server);
  ~HttpFacade();

  HttpFacade(const HttpFacade&) = delete;
  HttpFacade& operator=(const HttpFacade&) = delete;

  // Binds and starts serving on a background thread. Port 0 picks an
  // ephemeral port. Returns the bound port; throws kIo on failure.
  int start(const std::string& host, int port);
  void stop();

  int port() const { return port_; }
  const std::string& host() const { return host_; }

 private:
  KeyServer& server_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  std::string host_;
  int port_ = -1;
};

class HttpKeyServerClient final : public KeyServerClient {
 public:
  HttpKeyServerClient(std::string host, int port);

  std::pair<Certificate, Certificate> root_certs() override;
  Certificate cek_certificate(const PlatformId& id,
                              std::optional<certs::VersionInfo> versions) override;

  // POST /revoke; the facade forwards to KeyServer::revoke_firmware.
  void revoke(firmware::FirmwareKind kind, std::uint32_t version);

 private:
  Certificate fetch(const std::string& path);

  std::string host_;
  int port_;
};

// Splits "host:port" (port may be 0). Throws kConfig on malformed input.
std::pair<std::string, int> parse_address(const std::string& addr);

}  // namespace sevsim::keyserver

#endif  // SEVSIM_KEYSERVER_HTTP_HPP_
