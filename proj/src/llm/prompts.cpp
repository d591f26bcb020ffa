#include "mapcolor/error.hpp"
#include "mapcolor/llm_gateway.hpp"

#include <fstream>
#include <sstream>

namespace mapcolor {

using nlohmann::json;

namespace {

constexpr std::string_view kTaskIntro = "Complete the following three tasks for the uploaded data.";
constexpr std::string_view kTask1 =
    "Check possible data errors in the upload data, such as missing data or abnormal values.";
constexpr std::string_view kTask2 =
    "Provide as detailed a description as possible based on the uploaded data, including topics, range, "
    "acquisition time, etc., as much as possible.";
constexpr std::string_view kTask3 =
    "Suggest color scheme type (sequential vs diverging) based on data characteristics.";

// Quoted word for word; only the punctuation is reduced to ASCII.
constexpr std::string_view kSchemeTypeKnowledge =
    "Sequential scheme is ideal for visualizing data with a clear order or magnitude, such as population "
    "density or income levels. Diverging scheme is ideal for visualizing data that deviates in two opposite "
    "directions from a meaningful midpoint, such as temperature anomalies or percentage change. You can "
    "determine the scheme type based on: Does the ranking have a 'center' or 'middle'? If it does, a "
    "diverging scheme is appropriate; if not, a sequential scheme is preferred.";

constexpr std::string_view kDesignerProfile =
    "You are a senior map designer who has spent many years producing choropleth maps for atlases, reports "
    "and newspapers. You know the ColorBrewer schemes well, you read statistical data quickly, and you are "
    "good at turning a client's loose wishes into a clear colour direction that a production cartographer "
    "can follow.";

std::string theme_knowledge() {
  return "Colour themes (use exactly one of these tokens):\n"
         "- strong_contrast: large steps between classes, vivid extremes, attention-grabbing.\n"
         "- light: airy and bright, high lightness, low saturation.\n"
         "- moderate: medium saturation and a balanced lightness range; the everyday default.\n"
         "- elegant: muted, refined tones with smooth transitions.\n"
         "- neutral: greys, beiges and desaturated hues; restrained and objective.\n"
         "\n"
         "Colour moods, each quantified into three levels:\n"
         "- temperature (temperature perception): cold (0), neutral (1), warm (2)\n"
         "- distance (spatial perception): near (0), medium (1), far (2)\n"
         "- weight (weight perception): light (0), medium (1), heavy (2)\n"
         "\n"
         "Scheme types:\n"
         "- sequential: ordered data without a meaningful midpoint; light for low values, dark for high.\n"
         "- diverging: data that departs in two directions from a meaningful midpoint; light in the middle, "
         "dark at both ends.";
}

constexpr std::string_view kConceptOutputFormat =
    "Reply with one fenced JSON block and nothing else:\n"
    "```json\n"
    "{\n"
    "  \"theme\": \"<strong_contrast | light | moderate | elegant | neutral>\",\n"
    "  \"temperature\": <0 | 1 | 2>,\n"
    "  \"distance\": <0 | 1 | 2>,\n"
    "  \"weight\": <0 | 1 | 2>,\n"
    "  \"scheme_type\": \"<sequential | diverging>\",\n"
    "  \"rationale\": \"<why these choices fit the intent and the data>\"\n"
    "}\n"
    "```\n"
    "Levels are integers, not words.";

constexpr std::string_view kConceptTodo =
    "1. Read the user intent and the data description in Data Input.\n"
    "2. Pick the theme that best matches the intent, using the Domain Knowledge and the examples.\n"
    "3. Set temperature, distance and weight to the levels the intent implies; use 1 when it is silent.\n"
    "4. Keep the suggested scheme type unless the intent clearly asks for the other one.\n"
    "5. Give a design rationale explaining each choice in terms of the intent, the data and colour theory.\n"
    "6. Output the result in the Output Format.";

constexpr std::string_view kSchemeOutputFormat =
    "Reply with one fenced JSON block and nothing else:\n"
    "```json\n"
    "{\n"
    "  \"colors\": [\"#rrggbb\", \"...\"]\n"
    "}\n"
    "```\n"
    "List exactly one colour per class, ordered from the lowest class to the highest.";

std::string scheme_rules() {
  return "Scheme type rules:\n"
         "- sequential: lightness decreases steadily from the lowest class to the highest; stay within one "
         "hue or a narrow band of neighbouring hues.\n"
         "- diverging: two hue ramps meet at a light middle class; balanced midpoints and contrasting "
         "extremes, with the darkest colours at both ends.\n"
         "- Neighbouring classes must be easy to tell apart.";
}

constexpr std::string_view kCustomizationOutputFormat =
    "Reply with one fenced JSON block and nothing else. Choose one tag.\n"
    "To change the colour concept, send only the fields that change:\n"
    "```json\n"
    "{\"tag\": \"concept_patch\", \"patch\": {\"weight\": 0}, \"reply\": \"<one sentence for the user>\"}\n"
    "```\n"
    "To change the colour scheme, send an adjustment applied to every colour, or per-class replacements "
    "(indices start at 0 for the lowest class):\n"
    "```json\n"
    "{\"tag\": \"scheme_patch\", \"adjustment\": {\"delta_lightness\": 0, \"delta_saturation\": 0, "
    "\"delta_hue_degrees\": 0}, \"replacements\": [{\"index\": 0, \"color\": \"#rrggbb\"}], \"reply\": \"...\"}\n"
    "```\n"
    "To start a new design from a fresh intent:\n"
    "```json\n"
    "{\"tag\": \"new_design\", \"intent\": \"<the intent in a few words>\", \"reply\": \"...\"}\n"
    "```\n"
    "Levels are integers 0, 1 or 2. Lightness and saturation deltas are in CIELab units; hue deltas in "
    "degrees.";

std::string render_few_shot(const std::vector<FewShotPair>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "Example " + std::to_string(i + 1) + "\nInput: " + pairs[i].input + "\nOutput:\n" + pairs[i].output;
  }
  return out;
}

std::string format_bound(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::vector<FewShotPair> load_pairs(const std::filesystem::path& file, bool concept_outputs) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::Internal, "cannot open prompt examples " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Internal, "prompt examples " + file.string() + " are not valid JSON: " + e.what());
  }
  std::vector<FewShotPair> out;
  try {
    for (const auto& item : doc) {
      FewShotPair p;
      p.input = item.at("input").get<std::string>();
      const auto& output = item.at("output");
      if (concept_outputs) {
        p.output = format_concept_response(concept_from_json(output));
      } else {
        ColorScheme s;
        for (const auto& hex : output.at("colors")) s.colors.push_back(parse_hex(hex.get<std::string>()));
        p.output = format_scheme_response(s);
      }
      out.push_back(std::move(p));
    }
  } catch (const std::exception& e) {
    throw Error(Errc::Internal, "bad example in " + file.string() + ": " + e.what());
  }
  if (out.size() != 2) {
    throw Error(Errc::Internal, file.string() + " must hold exactly 2 examples, found " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace

std::string_view prompt_kind_token(PromptKind k) {
  switch (k) {
    case PromptKind::Analysis: return "analysis";
    case PromptKind::Concept: return "concept";
    case PromptKind::Scheme: return "scheme";
    case PromptKind::Customization: return "customization";
  }
  return "analysis";
}

const std::string* PromptBundle::section(std::string_view name) const {
  for (const auto& [n, body] : sections) {
    if (n == name) return &body;
  }
  return nullptr;
}

std::string PromptBundle::render() const {
  std::string out;
  for (const auto& [name, body] : sections) {
    out += "### " + name + "\n" + body + "\n\n";
  }
  if (!user_payload.empty()) out += "### Uploaded Data\n" + user_payload + "\n";
  while (!out.empty() && out.back() == '\n') out.pop_back();
  out += "\n";
  return out;
}

void to_json(json& j, const PromptBundle& b) {
  json sections = json::array();
  for (const auto& [name, body] : b.sections) sections.push_back({{"name", name}, {"body", body}});
  json few_shot = json::array();
  for (const auto& p : b.few_shot) few_shot.push_back({{"input", p.input}, {"output", p.output}});
  j = json{{"kind", prompt_kind_token(b.kind)},
           {"role_instructions", b.role_instructions},
           {"sections", sections},
           {"few_shot", few_shot},
           {"user_payload", b.user_payload}};
}

void to_json(json& j, const ChatMessage& m) { j = json{{"role", m.role}, {"content", m.content}}; }

void from_json(const json& j, ChatMessage& m) {
  m.role = j.at("role").get<std::string>();
  m.content = j.at("content").get<std::string>();
}

std::vector<ChatMessage> to_messages(const PromptBundle& b, const std::vector<ChatMessage>& history) {
  std::vector<ChatMessage> out;
  if (!b.role_instructions.empty()) out.push_back({"system", b.role_instructions});
  out.push_back({"user", b.render()});
  out.insert(out.end(), history.begin(), history.end());
  return out;
}

PromptAssets PromptAssets::load(const std::filesystem::path& dir) {
  return {load_pairs(dir / "concept_examples.json", true), load_pairs(dir / "scheme_examples.json", false)};
}

const PromptAssets& PromptAssets::defaults() {
  static const PromptAssets assets = load(default_data_dir() / "prompts");
  return assets;
}

PromptBundle build_analysis_prompt(std::string_view raw_dataset) {
  PromptBundle b;
  b.kind = PromptKind::Analysis;
  b.role_instructions =
      "You are a careful data analyst helping a cartographer prepare data for a choropleth map.";
  b.sections.emplace_back("Tasks", std::string(kTaskIntro) + "\nTask 1: " + std::string(kTask1) +
                                       "\nTask 2: " + std::string(kTask2) + "\nTask 3: " + std::string(kTask3));
  b.sections.emplace_back("Domain Knowledge", std::string(kSchemeTypeKnowledge));
  b.sections.emplace_back("Output Format",
                          "Reply with one fenced JSON block and nothing else:\n"
                          "```json\n"
                          "{\n"
                          "  \"task_1_data_errors\": \"<errors found, or that none were found>\",\n"
                          "  \"task_2_description\": \"<the data description>\",\n"
                          "  \"task_3_scheme_type\": \"<sequential | diverging>\"\n"
                          "}\n"
                          "```\n"
                          "task_3_scheme_type must be exactly \"sequential\" or \"diverging\".");
  b.user_payload = std::string(raw_dataset);
  return b;
}

PromptBundle build_concept_prompt(std::string_view user_intent, std::string_view data_description,
                                  std::optional<SchemeType> suggested, const PromptAssets& assets) {
  if (trim(user_intent).empty()) throw Error(Errc::BadRequest, "user intent must not be empty");
  PromptBundle b;
  b.kind = PromptKind::Concept;
  b.role_instructions = "You are a map designer. Work through the sections of the user message in order.";
  std::string input = "User intent: " + std::string(user_intent) + "\nData description: " +
                      std::string(data_description);
  if (suggested) input += "\nSuggested scheme type: " + std::string(scheme_type_token(*suggested));
  b.sections.emplace_back("Data Input", input);
  b.sections.emplace_back("Profile Setting", std::string(kDesignerProfile));
  b.sections.emplace_back("Domain Knowledge", theme_knowledge());
  b.sections.emplace_back("Output Format", std::string(kConceptOutputFormat));
  b.few_shot = assets.concept_examples;
  b.sections.emplace_back("Few-shot Example", render_few_shot(b.few_shot));
  b.sections.emplace_back("TODO", std::string(kConceptTodo));
  return b;
}

PromptBundle build_scheme_prompt(const ColorConcept& c, const ClassBreaks& breaks, std::string_view constraints,
                                 const PromptAssets& assets) {
  PromptBundle b;
  b.kind = PromptKind::Scheme;
  b.role_instructions = "You are a map designer. Work through the sections of the user message in order.";
  std::string bounds;
  for (std::size_t i = 0; i < breaks.bounds.size(); ++i) {
    if (i > 0) bounds += ", ";
    bounds += format_bound(breaks.bounds[i]);
  }
  const std::string k = std::to_string(breaks.k());
  b.sections.emplace_back("Profile Setting", std::string(kDesignerProfile));
  b.sections.emplace_back("Data Input", "Colour concept: " + json(c).dump() + "\nNumber of classes: k=" + k +
                                            "\nClass bounds (" + std::string(method_token(breaks.method)) +
                                            "): " + bounds);
  b.sections.emplace_back("Domain Knowledge", std::string(constraints) + "\n" + scheme_rules());
  b.sections.emplace_back("Output Format", std::string(kSchemeOutputFormat));
  b.few_shot = assets.scheme_examples;
  b.sections.emplace_back("Few-shot Example", render_few_shot(b.few_shot));
  b.sections.emplace_back("TODO", "1. Read the colour concept and the class count.\n"
                                  "2. Choose hues that express the theme and the three mood levels.\n"
                                  "3. Produce exactly k=" + k + " colours ordered from the lowest class to the highest, "
                                  "following the scheme type rules.\n"
                                  "4. Output the result in the Output Format.");
  return b;
}

PromptBundle build_customization_prompt(CustomizationStage stage, std::string_view current_state,
                                        std::string_view utterance) {
  if (trim(utterance).empty()) throw Error(Errc::BadRequest, "utterance must not be empty");
  PromptBundle b;
  b.kind = PromptKind::Customization;
  b.role_instructions =
      "You are a map designer refining a choropleth colour design in conversation with its author.";
  b.sections.emplace_back("Current Stage", stage == CustomizationStage::Concept ? "colour concept" : "colour scheme");
  b.sections.emplace_back("Current State", std::string(current_state));
  b.sections.emplace_back("Domain Knowledge", theme_knowledge());
  b.sections.emplace_back("Output Format", std::string(kCustomizationOutputFormat));
  b.sections.emplace_back("TODO", "Interpret the request below and answer with the smallest change that "
                                  "satisfies it.\nRequest: " + std::string(utterance));
  return b;
}

}  // namespace mapcolor
