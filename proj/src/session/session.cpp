#include "mapcolor/error.hpp"
#include "mapcolor/session.hpp"

#include <algorithm>
#include <cctype>
#include <random>

namespace mapcolor {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string_view active_scheme_token(ActiveScheme a) {
  return a == ActiveScheme::Generated ? "generated" : "matched";
}

std::optional<ActiveScheme> parse_active_scheme(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "generated") return ActiveScheme::Generated;
  if (t == "matched") return ActiveScheme::Matched;
  return std::nullopt;
}

const ClassificationResult& ClassificationState::chosen() const {
  for (const auto& r : ranked) {
    if (r.breaks.method == selected) return r;
  }
  throw Error(Errc::StageIncomplete, "no classification result for method " + std::string(method_token(selected)));
}

void to_json(json& j, const Session& s) {
  json classification = nullptr;
  if (s.classification) {
    classification = {{"k", s.classification->k},
                      {"selected", method_token(s.classification->selected)},
                      {"ranked", s.classification->ranked},
                      {"notes", s.classification->notes}};
  }
  j = json{{"id", s.id},
           {"dataset_text", s.dataset_text},
           {"dataset", optional_json(s.dataset)},
           {"geometry", s.geometry ? *s.geometry : json(nullptr)},
           {"name_property", s.name_property},
           {"analysis", optional_json(s.analysis)},
           {"scheme_type", s.scheme_type ? json(scheme_type_token(*s.scheme_type)) : json(nullptr)},
           {"classification", classification},
           {"concept", optional_json(s.color_concept)},
           {"scheme", optional_json(s.scheme)},
           {"match", optional_json(s.match)},
           {"active_scheme", active_scheme_token(s.active_scheme)},
           {"lint", optional_json(s.lint)},
           {"chat_history", s.chat_history},
           {"warnings", s.warnings}};
}

void from_json(const json& j, Session& s) {
  s = Session{};
  s.id = j.at("id").get<std::string>();
  s.dataset_text = j.value("dataset_text", "");
  s.dataset = optional_from<Dataset>(j, "dataset");
  if (auto it = j.find("geometry"); it != j.end() && !it->is_null()) s.geometry = *it;
  s.name_property = j.value("name_property", "name");
  s.analysis = optional_from<DataAnalysis>(j, "analysis");
  if (auto t = optional_from<std::string>(j, "scheme_type")) s.scheme_type = parse_scheme_type(*t);
  if (auto it = j.find("classification"); it != j.end() && !it->is_null()) {
    ClassificationState c;
    c.k = it->at("k").get<int>();
    c.selected = parse_method(it->at("selected").get<std::string>()).value_or(Method::FisherJenks);
    c.ranked = it->at("ranked").get<std::vector<ClassificationResult>>();
    c.notes = it->at("notes").get<std::vector<std::string>>();
    s.classification = std::move(c);
  }
  s.color_concept = optional_from<ColorConcept>(j, "concept");
  s.scheme = optional_from<ColorScheme>(j, "scheme");
  s.match = optional_from<MatchResult>(j, "match");
  s.active_scheme = parse_active_scheme(j.value("active_scheme", "generated")).value_or(ActiveScheme::Generated);
  s.lint = optional_from<LintReport>(j, "lint");
  s.chat_history = j.value("chat_history", std::vector<ChatMessage>{});
  s.warnings = j.value("warnings", std::vector<std::string>{});
}

std::vector<std::string> invariant_violations(const Session& s) {
  std::vector<std::string> out;
  if (s.classification && !s.dataset) out.push_back("classification without data");
  if (s.color_concept && !s.classification) out.push_back("concept without classification");
  if (s.scheme && !s.color_concept) out.push_back("scheme without concept");
  if ((s.match || s.lint) && !s.scheme) out.push_back("match or lint without scheme");
  if (s.scheme && s.classification && s.scheme->k() != s.classification->k) {
    out.push_back("scheme has " + std::to_string(s.scheme->k()) + " colours for " +
                  std::to_string(s.classification->k) + " classes");
  }
  if (s.active_scheme == ActiveScheme::Matched && !s.match) out.push_back("matched scheme active without a match");
  return out;
}

std::string new_session_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (int word = 0; word < 2; ++word) {
    std::uint64_t v = rng();
    for (int i = 0; i < 16; ++i, v >>= 4) out.push_back(hex[v & 0xF]);
  }
  return out;
}

}  // namespace mapcolor
