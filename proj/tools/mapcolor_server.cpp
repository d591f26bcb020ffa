// HTTP service; configured entirely through MAPCOLOR_* environment variables.
#include "mapcolor/service.hpp"

#include <iostream>

int main() {
  try {
    auto cfg = mapcolor::ServiceConfig::from_env();
    std::cout << "{\"event\":\"listening\",\"host\":\"" << cfg.host << "\",\"port\":" << cfg.port
              << ",\"offline\":" << (cfg.offline ? "true" : "false") << "}" << std::endl;
    mapcolor::Service service(cfg);
    service.run();
  } catch (const mapcolor::Error& e) {
    std::cerr << "error: " << mapcolor::token(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
