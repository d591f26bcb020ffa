#pragma once

#include "mapcolor/classification.hpp"
#include "mapcolor/concept.hpp"
#include "mapcolor/error.hpp"
#include "mapcolor/palette_db.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mapcolor {

struct ProviderConfig {
  std::string base_url = "https://dashscope.aliyuncs.com/compatible-mode/v1";
  std::string api_key;
  std::string model_analysis = "qwen-long";
  std::string model_design = "qwen-plus";
  double temperature = 1.0;
  int max_output_tokens_analysis = 6000;
  int max_output_tokens_design = 8192;
  std::chrono::seconds timeout{60};

  // Throws BadRequest on an out-of-range temperature or empty model name.
  void validate() const;

  // MAPCOLOR_API_KEY, MAPCOLOR_BASE_URL, MAPCOLOR_MODEL_ANALYSIS,
  // MAPCOLOR_MODEL_DESIGN, MAPCOLOR_TEMPERATURE, MAPCOLOR_LLM_TIMEOUT.
  static ProviderConfig from_env();
};

enum class PromptKind { Analysis, Concept, Scheme, Customization };

std::string_view prompt_kind_token(PromptKind k);

struct FewShotPair {
  std::string input;
  std::string output;
};

struct PromptBundle {
  PromptKind kind = PromptKind::Analysis;
  std::string role_instructions;
  std::vector<std::pair<std::string, std::string>> sections;
  std::vector<FewShotPair> few_shot;
  std::string user_payload;

  const std::string* section(std::string_view name) const;
  // The user message: every section under a "### name" heading, then the payload.
  std::string render() const;
};

void to_json(nlohmann::json& j, const PromptBundle& b);

struct ChatMessage {
  std::string role;  // system, user or assistant
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);

// System prompt, rendered bundle, then any follow-up turns.
std::vector<ChatMessage> to_messages(const PromptBundle& b, const std::vector<ChatMessage>& history);

// Two authored examples per design stage, read from <data>/prompts.
struct PromptAssets {
  std::vector<FewShotPair> concept_examples;
  std::vector<FewShotPair> scheme_examples;

  static PromptAssets load(const std::filesystem::path& dir);
  static const PromptAssets& defaults();
};

struct DataAnalysis {
  std::string error_findings;
  std::string description;
  SchemeType suggested_scheme_type = SchemeType::Sequential;
  std::string raw;
};

void to_json(nlohmann::json& j, const DataAnalysis& a);
void from_json(const nlohmann::json& j, DataAnalysis& a);

PromptBundle build_analysis_prompt(std::string_view raw_dataset);
DataAnalysis parse_analysis(std::string_view response);

PromptBundle build_concept_prompt(std::string_view user_intent, std::string_view data_description,
                                  std::optional<SchemeType> suggested = std::nullopt,
                                  const PromptAssets& assets = PromptAssets::defaults());
ColorConcept parse_concept(std::string_view response);
// The Output Format rendering of a concept, as a fenced JSON block.
std::string format_concept_response(const ColorConcept& c);

PromptBundle build_scheme_prompt(const ColorConcept& c, const ClassBreaks& breaks,
                                 std::string_view constraints,
                                 const PromptAssets& assets = PromptAssets::defaults());
ColorScheme parse_scheme(std::string_view response, int expected_k);
std::string format_scheme_response(const ColorScheme& s);

enum class CustomizationStage { Concept, Scheme };

struct SchemePatch {
  std::optional<ColorAdjustment> adjustment;
  std::vector<std::pair<int, RGBColor>> replacements;

  bool empty() const { return !adjustment && replacements.empty(); }
};

void to_json(nlohmann::json& j, const SchemePatch& p);
// Throws PatchOutOfRange for an index outside [0, k).
SchemePatch scheme_patch_from_json(const nlohmann::json& j, int k);

enum class ChatEffect { ConceptPatch, SchemePatch, NewDesign };

std::string_view chat_effect_token(ChatEffect e);

struct Customization {
  ChatEffect effect = ChatEffect::ConceptPatch;
  ConceptPatch concept_patch;
  SchemePatch scheme_patch;
  std::string intent;  // NewDesign only
  std::string reply;
};

// `current_state` is the serialized concept (and scheme, at the Scheme stage).
PromptBundle build_customization_prompt(CustomizationStage stage, std::string_view current_state,
                                        std::string_view utterance);
// `k` bounds replacement indices; scheme patches are rejected at the Concept stage.
Customization parse_customization(std::string_view response, CustomizationStage stage, int k);

// First fenced block (```json preferred), else the whole text when it is a
// bare JSON object. Throws UnparseableResponse.
nlohmann::json extract_json_block(std::string_view response);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const ProviderConfig& cfg, const PromptBundle& bundle,
                               const std::vector<ChatMessage>& history) = 0;
};

// The content that keys a fixture: kind, messages, nothing provider-specific.
nlohmann::json canonical_request(const PromptBundle& bundle, const std::vector<ChatMessage>& history);
// Lower-case hex SHA-256 of the canonical request dump.
std::string request_hash(const PromptBundle& bundle, const std::vector<ChatMessage>& history);
std::string sha256_hex(std::string_view data);

// Replays <dir>/<hash>.json files holding {"request", "response"}.
class FixtureBackend : public LlmBackend {
 public:
  explicit FixtureBackend(std::filesystem::path dir);

  std::string complete(const ProviderConfig& cfg, const PromptBundle& bundle,
                       const std::vector<ChatMessage>& history) override;

  const std::filesystem::path& dir() const { return dir_; }

  // Writes the fixture for this request; returns its path.
  static std::filesystem::path record(const std::filesystem::path& dir, const PromptBundle& bundle,
                                      const std::vector<ChatMessage>& history, std::string_view response);

 private:
  std::filesystem::path dir_;
};

// OpenAI-compatible POST {base_url}/chat/completions.
class HttpBackend : public LlmBackend {
 public:
  std::string complete(const ProviderConfig& cfg, const PromptBundle& bundle,
                       const std::vector<ChatMessage>& history) override;
};

// Number of requests any HttpBackend has put on the wire in this process.
std::uint64_t live_request_count();

// Runs a prompt through a backend with one re-ask on UnparseableResponse.
class Gateway {
 public:
  Gateway(ProviderConfig cfg, std::shared_ptr<LlmBackend> backend);

  DataAnalysis analyze(std::string_view raw_dataset);
  ColorConcept generate_concept(std::string_view intent, std::string_view description,
                                std::optional<SchemeType> suggested);
  ColorScheme generate_scheme(const ColorConcept& c, const ClassBreaks& breaks);
  Customization customize(CustomizationStage stage, std::string_view current_state,
                          std::string_view utterance, int k);

  const ProviderConfig& config() const { return cfg_; }

  template <typename Parse>
  auto ask(const PromptBundle& bundle, Parse parse) -> decltype(parse(std::string_view{}));

 private:
  ProviderConfig cfg_;
  std::shared_ptr<LlmBackend> backend_;
};

template <typename Parse>
auto Gateway::ask(const PromptBundle& bundle, Parse parse) -> decltype(parse(std::string_view{})) {
  std::vector<ChatMessage> history;
  std::string response = backend_->complete(cfg_, bundle, history);
  try {
    return parse(std::string_view(response));
  } catch (const Error& e) {
    if (e.code() != Errc::UnparseableResponse) throw;
    history.push_back({"assistant", response});
    history.push_back({"user", std::string("Your previous reply could not be parsed: ") + e.what() +
                                   ". Reply again, following the Output Format exactly."});
  }
  response = backend_->complete(cfg_, bundle, history);
  return parse(std::string_view(response));
}

}  // namespace mapcolor
