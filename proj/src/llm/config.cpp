#include "mapcolor/error.hpp"
#include "mapcolor/llm_gateway.hpp"

#include <cstdlib>
#include <string>

namespace mapcolor {

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

}  // namespace

void ProviderConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(Errc::BadRequest, "temperature must lie in [0, 2], got " + std::to_string(temperature));
  }
  if (model_analysis.empty() || model_design.empty()) {
    throw Error(Errc::BadRequest, "model names must not be empty");
  }
  if (base_url.empty()) throw Error(Errc::BadRequest, "provider base URL must not be empty");
  if (timeout.count() <= 0) throw Error(Errc::BadRequest, "provider timeout must be positive");
}

ProviderConfig ProviderConfig::from_env() {
  ProviderConfig cfg;
  if (auto v = env("MAPCOLOR_API_KEY")) cfg.api_key = *v;
  if (auto v = env("MAPCOLOR_BASE_URL")) cfg.base_url = *v;
  if (auto v = env("MAPCOLOR_MODEL_ANALYSIS")) cfg.model_analysis = *v;
  if (auto v = env("MAPCOLOR_MODEL_DESIGN")) cfg.model_design = *v;
  try {
    if (auto v = env("MAPCOLOR_TEMPERATURE")) cfg.temperature = std::stod(*v);
    if (auto v = env("MAPCOLOR_LLM_TIMEOUT")) cfg.timeout = std::chrono::seconds(std::stol(*v));
  } catch (const std::logic_error&) {
    throw Error(Errc::BadRequest, "MAPCOLOR_TEMPERATURE and MAPCOLOR_LLM_TIMEOUT must be numbers");
  }
  cfg.validate();
  return cfg;
}

}  // namespace mapcolor
