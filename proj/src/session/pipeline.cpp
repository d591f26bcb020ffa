#include "mapcolor/error.hpp"
#include "mapcolor/session.hpp"

namespace mapcolor {

using nlohmann::json;

namespace {

[[noreturn]] void incomplete(const std::string& message) { throw Error(Errc::StageIncomplete, message); }

void clear_scheme(Session& s) {
  s.scheme.reset();
  s.match.reset();
  s.lint.reset();
  s.active_scheme = ActiveScheme::Generated;
  s.warnings.clear();
}

void clear_concept(Session& s) {
  s.color_concept.reset();
  clear_scheme(s);
}

std::string hex_list(const ColorScheme& s) {
  std::string out;
  for (auto c : s.colors) {
    if (!out.empty()) out += ", ";
    out += format_hex(c);
  }
  return out;
}

void check_level(const std::optional<int>& v, const char* field) {
  if (v && (*v < 0 || *v > 2)) {
    throw Error(Errc::PatchOutOfRange, std::string(field) + " must be 0, 1 or 2, got " + std::to_string(*v),
                {{"field", field}});
  }
}

void check_index(int index, int k) {
  if (index < 0 || index >= k) {
    throw Error(Errc::PatchOutOfRange,
                "colour index " + std::to_string(index) + " is outside [0, " + std::to_string(k) + ")",
                {{"index", index}, {"k", k}});
  }
}

}  // namespace

ColorScheme displayed_scheme(const Session& s) {
  if (!s.scheme) incomplete("no colour scheme yet; run the scheme stage first");
  if (s.active_scheme == ActiveScheme::Matched && s.match) {
    auto out = palette_as_scheme(s.match->palette, s.match->reversed, SchemeSource::Matched);
    out.scheme_type = s.scheme->scheme_type;
    return out;
  }
  return *s.scheme;
}

Designer::Designer(std::shared_ptr<Gateway> gateway, std::shared_ptr<const PaletteDB> palettes,
                   ClassifyOptions options)
    : gateway_(std::move(gateway)), palettes_(std::move(palettes)), options_(options) {}

UploadResult Designer::upload(Session& s, std::string_view dataset_text, std::string_view value_field,
                              std::optional<json> geometry, std::string_view name_property) const {
  Dataset d = parse_dataset(dataset_text, value_field);
  UploadResult result;
  result.report = validate_dataset(d);
  if (!result.report.is_clean) {
    throw Error(Errc::DataInvalid, "the data has missing, duplicate or non-numeric entries",
                {{"report", result.report}});
  }
  result.summary = summarize(d);
  if (geometry) result.join = join_geometry(d, *geometry, name_property);

  Session next;
  next.id = s.id;
  next.chat_history = s.chat_history;
  next.dataset_text = std::string(dataset_text);
  next.dataset = std::move(d);
  next.geometry = std::move(geometry);
  next.name_property = std::string(name_property);
  s = std::move(next);
  return result;
}

void Designer::run_stage1(Session& s, int k) const {
  if (!s.dataset) incomplete("no data uploaded");
  Session next = s;
  const auto values = next.dataset->values();
  auto ranked = classify_all(values, k, options_);
  next.classification = ClassificationState{k, ranked.results.front().breaks.method, std::move(ranked.results),
                                            std::move(ranked.notes)};
  clear_concept(next);
  if (!next.analysis) {
    next.analysis = gateway_->analyze(next.dataset_text);
    next.chat_history.push_back({"assistant", "Data check: " + next.analysis->error_findings +
                                                  "\nDescription: " + next.analysis->description +
                                                  "\nSuggested scheme type: " +
                                                  std::string(scheme_type_token(next.analysis->suggested_scheme_type))});
  }
  if (!next.scheme_type) next.scheme_type = next.analysis->suggested_scheme_type;
  s = std::move(next);
}

void Designer::select_method(Session& s, Method m) const {
  if (!s.classification) incomplete("classify the data first");
  Session next = s;
  next.classification->selected = m;
  (void)next.classification->chosen();
  clear_scheme(next);
  s = std::move(next);
}

void Designer::set_scheme_type(Session& s, SchemeType t) const {
  if (!s.dataset) incomplete("no data uploaded");
  Session next = s;
  next.scheme_type = t;
  if (next.color_concept && next.color_concept->scheme_type != t) {
    next.color_concept->scheme_type = t;
    clear_scheme(next);
  }
  s = std::move(next);
}

void Designer::run_stage2(Session& s, std::string_view intent) const {
  if (!s.classification || !s.analysis) incomplete("classify the data before designing a concept");
  if (trim(intent).empty()) throw Error(Errc::BadRequest, "intent must not be empty");
  Session next = s;
  next.color_concept = gateway_->generate_concept(intent, next.analysis->description, next.scheme_type);
  clear_scheme(next);
  next.chat_history.push_back({"user", "Intent: " + std::string(intent)});
  next.chat_history.push_back({"assistant", "Concept: " + json(*next.color_concept).dump()});
  s = std::move(next);
}

void Designer::run_stage3(Session& s) const {
  if (!s.color_concept) incomplete("design a colour concept before generating a scheme");
  Session next = s;
  next.scheme = gateway_->generate_scheme(*next.color_concept, next.classification->chosen().breaks);
  next.active_scheme = ActiveScheme::Generated;
  refresh_scheme_checks(next);
  std::string message = "Scheme: " + hex_list(*next.scheme);
  if (next.match) {
    message += "\nClosest ColorBrewer scheme: " + next.match->palette.name +
               (next.match->reversed ? " (reversed)" : "");
  }
  next.chat_history.push_back({"assistant", message});
  s = std::move(next);
}

void Designer::refresh_scheme_checks(Session& s) const {
  s.warnings.clear();
  try {
    s.match = match_scheme(*s.scheme, *palettes_);
  } catch (const Error& e) {
    if (e.code() != Errc::NoCandidates) throw;
    s.match.reset();
    s.warnings.push_back(e.what());
  }
  if (!s.match) s.active_scheme = ActiveScheme::Generated;
  s.lint = lint_scheme(*s.scheme);
}

void Designer::apply_patch(Session& s, const Patch& p) const {
  Session next = s;
  if (const auto* cp = std::get_if<ConceptPatch>(&p)) {
    if (!next.color_concept) incomplete("no colour concept to patch");
    check_level(cp->temperature, "temperature");
    check_level(cp->distance, "distance");
    check_level(cp->weight, "weight");
    next.color_concept = mapcolor::apply_patch(*next.color_concept, *cp);
    if (cp->scheme_type) next.scheme_type = cp->scheme_type;
    clear_scheme(next);
  } else if (const auto* sp = std::get_if<SchemePatch>(&p)) {
    ColorScheme base = displayed_scheme(next);
    for (const auto& [index, color] : sp->replacements) check_index(index, base.k());
    if (sp->adjustment) {
      for (auto& c : base.colors) c = adjust(c, *sp->adjustment);
    }
    for (const auto& [index, color] : sp->replacements) base.colors[static_cast<std::size_t>(index)] = color;
    base.source = SchemeSource::UserEdited;
    next.scheme = std::move(base);
    next.active_scheme = ActiveScheme::Generated;
    refresh_scheme_checks(next);
  } else {
    const auto& edit = std::get<DirectEdit>(p);
    ColorScheme base = displayed_scheme(next);
    check_index(edit.index, base.k());
    base.colors[static_cast<std::size_t>(edit.index)] = edit.color;
    base.source = SchemeSource::UserEdited;
    next.scheme = std::move(base);
    next.active_scheme = ActiveScheme::Generated;
    refresh_scheme_checks(next);
  }
  s = std::move(next);
}

void Designer::set_active(Session& s, ActiveScheme a) const {
  if (!s.scheme) incomplete("no colour scheme yet");
  if (a == ActiveScheme::Matched && !s.match) incomplete("no matching ColorBrewer scheme for this scheme");
  s.active_scheme = a;
}

ChatOutcome Designer::chat(Session& s, std::string_view utterance) const {
  if (trim(utterance).empty()) throw Error(Errc::BadRequest, "utterance must not be empty");
  if (!s.classification) incomplete("upload and classify the data before chatting about colours");
  Session next = s;
  const bool scheme_stage = next.scheme.has_value();
  json state{{"concept", next.color_concept ? json(*next.color_concept) : json(nullptr)}};
  if (scheme_stage) {
    json colors = json::array();
    for (auto c : displayed_scheme(next).colors) colors.push_back(format_hex(c));
    state["scheme"] = colors;
  }
  const auto stage = scheme_stage ? CustomizationStage::Scheme : CustomizationStage::Concept;
  const auto result = gateway_->customize(stage, state.dump(2), utterance, next.classification->k);
  next.chat_history.push_back({"user", std::string(utterance)});
  if (!result.reply.empty()) next.chat_history.push_back({"assistant", result.reply});

  switch (result.effect) {
    case ChatEffect::ConceptPatch:
      apply_patch(next, result.concept_patch);
      break;
    case ChatEffect::SchemePatch:
      apply_patch(next, result.scheme_patch);
      break;
    case ChatEffect::NewDesign:
      run_stage2(next, result.intent);
      run_stage3(next);
      break;
  }
  s = std::move(next);
  return {result.effect, result.reply};
}

}  // namespace mapcolor
