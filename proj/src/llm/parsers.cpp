#include "mapcolor/error.hpp"
#include "mapcolor/llm_gateway.hpp"

#include <algorithm>
#include <cctype>

namespace mapcolor {

using nlohmann::json;

namespace {

[[noreturn]] void unparseable(const std::string& message, json details = nullptr) {
  throw Error(Errc::UnparseableResponse, message, std::move(details));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

json require_object(std::string_view response, const char* what) {
  json j = extract_json_block(response);
  if (!j.is_object()) unparseable(std::string(what) + " must be a JSON object");
  return j;
}

std::string require_string(const json& j, const char* key, const char* label) {
  auto it = j.find(key);
  if (it == j.end()) unparseable(std::string("response is missing ") + label + " (" + key + ")", {{"section", key}});
  if (!it->is_string()) unparseable(std::string(label) + " (" + key + ") must be a string", {{"section", key}});
  return it->get<std::string>();
}

}  // namespace

json extract_json_block(std::string_view text) {
  struct Block {
    std::string lang;
    std::string_view body;
  };
  std::vector<Block> blocks;
  std::size_t pos = 0;
  while ((pos = text.find("```", pos)) != std::string_view::npos) {
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) unparseable("unterminated code fence");
    const std::string lang = lower(trim(text.substr(pos + 3, eol - pos - 3)));
    const std::size_t close = text.find("```", eol + 1);
    if (close == std::string_view::npos) unparseable("unterminated code fence");
    blocks.push_back({lang, text.substr(eol + 1, close - eol - 1)});
    pos = close + 3;
  }

  std::string_view body;
  if (!blocks.empty()) {
    auto it = std::find_if(blocks.begin(), blocks.end(), [](const Block& b) { return b.lang == "json"; });
    body = (it != blocks.end() ? *it : blocks.front()).body;
  } else {
    const std::string t = trim(text);
    if (t.empty() || t.front() != '{') unparseable("no fenced JSON block in the response");
    body = text;
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    unparseable(std::string("fenced block is not valid JSON: ") + e.what());
  }
}

void to_json(json& j, const DataAnalysis& a) {
  j = json{{"error_findings", a.error_findings},
           {"description", a.description},
           {"suggested_scheme_type", scheme_type_token(a.suggested_scheme_type)},
           {"raw", a.raw}};
}

void from_json(const json& j, DataAnalysis& a) {
  a.error_findings = j.at("error_findings").get<std::string>();
  a.description = j.at("description").get<std::string>();
  a.suggested_scheme_type =
      parse_scheme_type(j.at("suggested_scheme_type").get<std::string>()).value_or(SchemeType::Sequential);
  a.raw = j.value("raw", "");
}

DataAnalysis parse_analysis(std::string_view response) {
  const json j = require_object(response, "analysis");
  DataAnalysis a;
  a.error_findings = require_string(j, "task_1_data_errors", "Task 1");
  a.description = require_string(j, "task_2_description", "Task 2");
  const auto type_text = require_string(j, "task_3_scheme_type", "Task 3");
  const auto type = parse_scheme_type(trim(type_text));
  if (!type) {
    throw Error(Errc::BadSchemeType, "scheme type \"" + type_text + "\" is neither sequential nor diverging",
                {{"found", type_text}});
  }
  a.suggested_scheme_type = *type;
  a.raw = std::string(response);
  return a;
}

ColorConcept parse_concept(std::string_view response) {
  return concept_from_json(require_object(response, "concept"));
}

std::string format_concept_response(const ColorConcept& c) {
  return "```json\n" + json(c).dump(2) + "\n```";
}

ColorScheme parse_scheme(std::string_view response, int expected_k) {
  if (expected_k < 3 || expected_k > 11) {
    throw Error(Errc::BadK, "expected colour count must lie in [3, 11], got " + std::to_string(expected_k));
  }
  const json j = require_object(response, "scheme");
  auto it = j.find("colors");
  if (it == j.end() || !it->is_array()) unparseable("scheme response needs a \"colors\" array");
  for (const auto& c : *it) {
    if (!c.is_string()) unparseable("every colour must be a \"#rrggbb\" string");
  }
  const int found = static_cast<int>(it->size());
  if (found != expected_k) {
    throw Error(Errc::WrongColorCount,
                "expected " + std::to_string(expected_k) + " colours, found " + std::to_string(found),
                {{"found", found}, {"expected", expected_k}});
  }
  ColorScheme s;
  s.source = SchemeSource::Generated;
  for (int i = 0; i < found; ++i) {
    const auto text = (*it)[i].get<std::string>();
    try {
      s.colors.push_back(parse_hex(text));
    } catch (const Error& e) {
      throw Error(Errc::BadHex, "colour " + std::to_string(i) + ": " + e.what(), {{"index", i}, {"found", text}});
    }
  }
  return s;
}

std::string format_scheme_response(const ColorScheme& s) {
  json colors = json::array();
  for (auto c : s.colors) colors.push_back(format_hex(c));
  return "```json\n" + json{{"colors", colors}}.dump(2) + "\n```";
}

std::string_view chat_effect_token(ChatEffect e) {
  switch (e) {
    case ChatEffect::ConceptPatch: return "concept_patch";
    case ChatEffect::SchemePatch: return "scheme_patch";
    case ChatEffect::NewDesign: return "new_design";
  }
  return "concept_patch";
}

void to_json(json& j, const SchemePatch& p) {
  j = json::object();
  if (p.adjustment) {
    j["adjustment"] = {{"delta_lightness", p.adjustment->delta_lightness},
                       {"delta_saturation", p.adjustment->delta_saturation},
                       {"delta_hue_degrees", p.adjustment->delta_hue_degrees}};
  }
  json reps = json::array();
  for (const auto& [index, color] : p.replacements) reps.push_back({{"index", index}, {"color", format_hex(color)}});
  j["replacements"] = reps;
}

SchemePatch scheme_patch_from_json(const json& j, int k) {
  if (!j.is_object()) throw Error(Errc::BadRequest, "scheme patch must be a JSON object");
  SchemePatch p;
  if (auto it = j.find("adjustment"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(Errc::BadRequest, "adjustment must be an object");
    ColorAdjustment adj;
    const std::pair<const char*, double*> fields[] = {{"delta_lightness", &adj.delta_lightness},
                                                      {"delta_saturation", &adj.delta_saturation},
                                                      {"delta_hue_degrees", &adj.delta_hue_degrees}};
    for (const auto& [key, target] : fields) {
      if (auto f = it->find(key); f != it->end()) {
        if (!f->is_number()) throw Error(Errc::BadRequest, std::string(key) + " must be a number");
        *target = f->get<double>();
      }
    }
    if (!adj.is_zero()) p.adjustment = adj;
  }
  if (auto it = j.find("replacements"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(Errc::BadRequest, "replacements must be an array");
    for (const auto& r : *it) {
      if (!r.is_object() || !r.contains("index") || !r.contains("color") || !r["index"].is_number_integer() ||
          !r["color"].is_string()) {
        throw Error(Errc::BadRequest, "each replacement needs an integer index and a colour string");
      }
      const int index = r["index"].get<int>();
      if (index < 0 || index >= k) {
        throw Error(Errc::PatchOutOfRange,
                    "colour index " + std::to_string(index) + " is outside [0, " + std::to_string(k) + ")",
                    {{"index", index}, {"k", k}});
      }
      p.replacements.emplace_back(index, parse_hex(r["color"].get<std::string>()));
    }
  }
  return p;
}

Customization parse_customization(std::string_view response, CustomizationStage stage, int k) {
  const json j = require_object(response, "customization");
  Customization out;
  const auto tag = require_string(j, "tag", "tag");
  if (auto it = j.find("reply"); it != j.end() && it->is_string()) out.reply = it->get<std::string>();

  if (tag == "concept_patch") {
    out.effect = ChatEffect::ConceptPatch;
    auto it = j.find("patch");
    if (it == j.end()) unparseable("concept_patch needs a \"patch\" object", {{"section", "patch"}});
    out.concept_patch = concept_patch_from_json(*it);
    if (out.concept_patch.empty()) unparseable("concept_patch changes no field");
  } else if (tag == "scheme_patch") {
    out.effect = ChatEffect::SchemePatch;
    if (stage == CustomizationStage::Concept) unparseable("scheme_patch sent before any scheme exists");
    try {
      out.scheme_patch = scheme_patch_from_json(j, k);
    } catch (const Error& e) {
      if (e.code() != Errc::BadRequest) throw;
      unparseable(e.what());
    }
    if (out.scheme_patch.empty()) unparseable("scheme_patch changes nothing");
  } else if (tag == "new_design") {
    out.effect = ChatEffect::NewDesign;
    out.intent = trim(require_string(j, "intent", "intent"));
    if (out.intent.empty()) unparseable("new_design needs a non-empty intent");
  } else {
    unparseable("unknown tag \"" + tag + "\"; expected concept_patch, scheme_patch or new_design",
                {{"found", tag}});
  }
  return out;
}

}  // namespace mapcolor
