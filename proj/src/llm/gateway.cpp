#include "mapcolor/llm_gateway.hpp"

namespace mapcolor {

Gateway::Gateway(ProviderConfig cfg, std::shared_ptr<LlmBackend> backend)
    : cfg_(std::move(cfg)), backend_(std::move(backend)) {
  cfg_.validate();
}

DataAnalysis Gateway::analyze(std::string_view raw_dataset) {
  return ask(build_analysis_prompt(raw_dataset), parse_analysis);
}

ColorConcept Gateway::generate_concept(std::string_view intent, std::string_view description,
                                       std::optional<SchemeType> suggested) {
  return ask(build_concept_prompt(intent, description, suggested), parse_concept);
}

ColorScheme Gateway::generate_scheme(const ColorConcept& c, const ClassBreaks& breaks) {
  const int k = breaks.k();
  auto s = ask(build_scheme_prompt(c, breaks, concept_to_constraints(c)),
               [k](std::string_view r) { return parse_scheme(r, k); });
  s.scheme_type = c.scheme_type;
  return s;
}

Customization Gateway::customize(CustomizationStage stage, std::string_view current_state,
                                 std::string_view utterance, int k) {
  return ask(build_customization_prompt(stage, current_state, utterance),
             [stage, k](std::string_view r) { return parse_customization(r, stage, k); });
}

}  // namespace mapcolor
