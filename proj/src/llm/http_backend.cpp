#include "mapcolor/error.hpp"
#include "mapcolor/llm_gateway.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>

namespace mapcolor {

using nlohmann::json;

namespace {

std::atomic<std::uint64_t> g_live_requests{0};

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::BadRequest, "provider base URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 300;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

std::uint64_t live_request_count() { return g_live_requests.load(); }

std::string HttpBackend::complete(const ProviderConfig& cfg, const PromptBundle& bundle,
                                  const std::vector<ChatMessage>& history) {
  if (cfg.api_key.empty()) {
    throw Error(Errc::AuthFailure, "no API key configured; set MAPCOLOR_API_KEY or use offline fixtures");
  }
  const bool analysis = bundle.kind == PromptKind::Analysis;
  const json body{{"model", analysis ? cfg.model_analysis : cfg.model_design},
                  {"messages", to_messages(bundle, history)},
                  {"temperature", cfg.temperature},
                  {"max_tokens", analysis ? cfg.max_output_tokens_analysis : cfg.max_output_tokens_design}};

  const auto endpoint = split_url(cfg.base_url);
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(cfg.timeout);
  client.set_read_timeout(cfg.timeout);
  client.set_write_timeout(cfg.timeout);
  client.set_bearer_token_auth(cfg.api_key);

  ++g_live_requests;
  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(endpoint.path + "/chat/completions", body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= cfg.timeout)) {
      throw Error(Errc::Timeout, "provider did not answer within " + std::to_string(cfg.timeout.count()) + " s",
                  {{"timeout_seconds", cfg.timeout.count()}});
    }
    throw Error(Errc::ProviderError, "request to provider failed: " + httplib::to_string(err),
                {{"status", nullptr}, {"body", ""}});
  }

  const int status = res->status;
  if (status == 401 || status == 403) {
    throw Error(Errc::AuthFailure, "provider rejected the credentials (HTTP " + std::to_string(status) + ")",
                {{"status", status}});
  }
  if (status == 429) {
    json details{{"status", status}, {"retry_after", nullptr}};
    if (res->has_header("Retry-After")) details["retry_after"] = res->get_header_value("Retry-After");
    throw Error(Errc::RateLimited, "provider rate limit reached", details);
  }
  if (status == 408 || status == 504) {
    throw Error(Errc::Timeout, "provider timed out (HTTP " + std::to_string(status) + ")", {{"status", status}});
  }
  if (status < 200 || status >= 300) {
    throw Error(Errc::ProviderError, "provider answered HTTP " + std::to_string(status),
                {{"status", status}, {"body", excerpt(res->body)}});
  }
  try {
    return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw Error(Errc::ProviderError, "provider reply is not a chat completion",
                {{"status", status}, {"body", excerpt(res->body)}});
  }
}

}  // namespace mapcolor
