#include "mapcolor/error.hpp"
#include "mapcolor/llm_gateway.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>

namespace mapcolor {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(Errc::Internal, "SHA-256 computation failed");
  }
  constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

json canonical_request(const PromptBundle& bundle, const std::vector<ChatMessage>& history) {
  return json{{"kind", prompt_kind_token(bundle.kind)}, {"messages", to_messages(bundle, history)}};
}

std::string request_hash(const PromptBundle& bundle, const std::vector<ChatMessage>& history) {
  return sha256_hex(canonical_request(bundle, history).dump());
}

FixtureBackend::FixtureBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FixtureBackend::complete(const ProviderConfig&, const PromptBundle& bundle,
                                     const std::vector<ChatMessage>& history) {
  const auto hash = request_hash(bundle, history);
  const auto file = dir_ / (hash + ".json");
  std::ifstream in(file);
  if (!in) {
    throw Error(Errc::FixtureMiss,
                "no recorded " + std::string(prompt_kind_token(bundle.kind)) + " response for request " + hash +
                    " in " + dir_.string(),
                {{"hash", hash}, {"dir", dir_.string()}});
  }
  try {
    return json::parse(in).at("response").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(Errc::FixtureMiss, "fixture " + file.string() + " is unreadable: " + e.what(), {{"hash", hash}});
  }
}

std::filesystem::path FixtureBackend::record(const std::filesystem::path& dir, const PromptBundle& bundle,
                                             const std::vector<ChatMessage>& history, std::string_view response) {
  std::filesystem::create_directories(dir);
  const auto hash = request_hash(bundle, history);
  const auto file = dir / (hash + ".json");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Internal, "cannot write fixture " + file.string());
  out << json{{"request", canonical_request(bundle, history)}, {"response", response}}.dump(2) << "\n";
  return file;
}

}  // namespace mapcolor
