// Regenerates the offline LLM fixtures. Each scripted scenario runs the real
// pipeline; whenever it asks the model something, the authored reply for that
// prompt is looked up and stored under the request hash.
//
//   record_fixtures [--responses DIR] [--out DIR]
#include "mapcolor/error.hpp"
#include "mapcolor/session.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace mapcolor;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MalformedInput, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Text after `label` up to the end of its line, inside the named section.
std::string field_of(const PromptBundle& b, const std::string& section, const std::string& label) {
  const std::string* body = b.section(section);
  if (body == nullptr) return {};
  const auto pos = body->find(label);
  if (pos == std::string::npos) return {};
  const auto start = pos + label.size();
  return body->substr(start, body->find('\n', start) - start);
}

class ScriptedRecorder : public LlmBackend {
 public:
  ScriptedRecorder(std::filesystem::path responses, std::filesystem::path out)
      : responses_(std::move(responses)), out_(std::move(out)) {}

  std::string complete(const ProviderConfig&, const PromptBundle& b, const std::vector<ChatMessage>& history) override {
    const std::string name = pick(b);
    const std::string response = read_file(responses_ / (name + ".txt"));
    const auto file = FixtureBackend::record(out_, b, history, response);
    if (written_.insert(file.filename().string()).second) {
      std::cout << file.filename().string() << "  " << prompt_kind_token(b.kind) << "  " << name << "\n";
    }
    return response;
  }

  std::size_t written() const { return written_.size(); }

 private:
  static std::string pick(const PromptBundle& b) {
    switch (b.kind) {
      case PromptKind::Analysis:
        return "analysis_gdp";
      case PromptKind::Concept: {
        const auto intent = field_of(b, "Data Input", "User intent: ");
        if (intent == "Statue of Liberty like") return "concept_liberty";
        if (intent == "a warm, eye-catching map of economic output") return "concept_warm";
        throw Error(Errc::FixtureMiss, "no authored concept for intent \"" + intent + "\"");
      }
      case PromptKind::Scheme: {
        const auto concept_text = field_of(b, "Data Input", "Colour concept: ");
        const auto c = json::parse(concept_text).get<ColorConcept>();
        if (c.theme == Theme::Elegant) return "scheme_liberty";
        if (c.theme == Theme::StrongContrast) return "scheme_warm";
        throw Error(Errc::FixtureMiss, "no authored scheme for theme " + std::string(theme_token(c.theme)));
      }
      case PromptKind::Customization: {
        const auto utterance = field_of(b, "TODO", "Request: ");
        if (utterance == "make the colors brighter") return "chat_brighter";
        if (utterance == "make these colors more vivid") return "chat_vivid";
        if (utterance == "classic soft tones") return "chat_soft";
        if (utterance == "I want a Statue of Liberty like map") return "chat_liberty";
        throw Error(Errc::FixtureMiss, "no authored reply for \"" + utterance + "\"");
      }
    }
    throw Error(Errc::Internal, "unknown prompt kind");
  }

  std::filesystem::path responses_;
  std::filesystem::path out_;
  std::set<std::string> written_;
};

}  // namespace

int main(int argc, char** argv) {
  const auto data = default_data_dir();
  std::string responses = (data / "fixtures" / "responses").string();
  std::string out = (data / "fixtures" / "llm").string();
  CLI::App app{"Record offline LLM fixtures for the GDP scenarios"};
  app.add_option("--responses", responses, "Authored response directory");
  app.add_option("--out", out, "Fixture output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    auto recorder = std::make_shared<ScriptedRecorder>(responses, out);
    auto palettes = std::make_shared<const PaletteDB>(PaletteDB::load(data / "colorbrewer.json"));
    Designer d(std::make_shared<Gateway>(ProviderConfig{}, recorder), palettes);
    const auto dataset = read_file(data / "fixtures" / "gdp_2023.json");
    const auto geometry = json::parse(read_file(data / "fixtures" / "china_provinces.geojson"));

    auto stage1 = [&] {
      Session s;
      d.upload(s, dataset, "gdp", std::optional<json>(geometry), "name");
      d.run_stage1(s, 5);
      return s;
    };
    auto liberty = [&] {
      Session s = stage1();
      d.run_stage2(s, "Statue of Liberty like");
      d.run_stage3(s);
      return s;
    };
    const std::vector<std::function<void()>> scenarios{
        [&] { liberty(); },
        [&] { Session s = liberty(); d.chat(s, "make the colors brighter"); },
        [&] { Session s = liberty(); d.chat(s, "make these colors more vivid"); },
        [&] {
          Session s = stage1();
          d.run_stage2(s, "Statue of Liberty like");
          d.chat(s, "classic soft tones");
        },
        [&] { Session s = stage1(); d.chat(s, "I want a Statue of Liberty like map"); },
        [&] {
          Session s = stage1();
          d.run_stage2(s, "a warm, eye-catching map of economic output");
          d.run_stage3(s);
        },
    };
    for (const auto& run : scenarios) run();
    std::cout << recorder->written() << " fixtures in " << out << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << token(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
}
