#pragma once

#include "mapcolor/error.hpp"
#include "mapcolor/session.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace mapcolor {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> session_dir;
  bool offline = false;
  std::filesystem::path fixture_dir = default_data_dir() / "fixtures" / "llm";
  ProviderConfig provider;
  std::size_t max_body_bytes = 20u * 1024u * 1024u;
  int worker_threads = 32;
  bool log_requests = true;

  // MAPCOLOR_HOST, MAPCOLOR_PORT, MAPCOLOR_SESSION_DIR, MAPCOLOR_OFFLINE,
  // MAPCOLOR_FIXTURE_DIR, MAPCOLOR_MAX_BODY_MB plus the provider variables.
  static ServiceConfig from_env();
};

int http_status(Errc code);
nlohmann::json error_body(Errc code, const std::string& message, const nlohmann::json& details = nullptr);

class Service {
 public:
  explicit Service(ServiceConfig cfg);
  // Injected backend and store, mainly for tests.
  Service(ServiceConfig cfg, std::shared_ptr<LlmBackend> backend, std::shared_ptr<SessionStore> store);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  int start();
  // Binds and serves on the calling thread.
  void run();
  void stop();

 private:
  struct State;
  void install_routes();
  int bind();

  std::unique_ptr<State> state_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace mapcolor
