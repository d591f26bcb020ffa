#pragma once

#include "mapcolor/classification.hpp"
#include "mapcolor/concept.hpp"
#include "mapcolor/data_model.hpp"
#include "mapcolor/llm_gateway.hpp"
#include "mapcolor/palette_db.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace mapcolor {

enum class ActiveScheme { Generated, Matched };

std::string_view active_scheme_token(ActiveScheme a);
std::optional<ActiveScheme> parse_active_scheme(std::string_view text);

struct ClassificationState {
  int k = 0;
  Method selected = Method::FisherJenks;
  std::vector<ClassificationResult> ranked;  // GVF descending
  std::vector<std::string> notes;

  // Throws StageIncomplete when the selected method has no result.
  const ClassificationResult& chosen() const;
};

// Stage order: data, classification, concept, scheme. A later artifact only
// exists while every earlier one does.
struct Session {
  std::string id;
  std::string dataset_text;
  std::optional<Dataset> dataset;
  std::optional<nlohmann::json> geometry;
  std::string name_property = "name";
  std::optional<DataAnalysis> analysis;
  std::optional<SchemeType> scheme_type;
  std::optional<ClassificationState> classification;
  std::optional<ColorConcept> color_concept;
  std::optional<ColorScheme> scheme;
  std::optional<MatchResult> match;
  ActiveScheme active_scheme = ActiveScheme::Generated;
  std::optional<LintReport> lint;
  std::vector<ChatMessage> chat_history;
  std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);

// Empty when the stage-order and class-count invariants hold.
std::vector<std::string> invariant_violations(const Session& s);

struct DirectEdit {
  int index = 0;
  RGBColor color;
};

using Patch = std::variant<ConceptPatch, SchemePatch, DirectEdit>;

struct UploadResult {
  ValidationReport report;
  DataSummary summary;
  std::optional<GeometryJoin> join;
};

struct ChatOutcome {
  ChatEffect effect = ChatEffect::ConceptPatch;
  std::string reply;
};

// Every operation works on a copy and commits only on success, so a throwing
// call leaves the session untouched.
class Designer {
 public:
  Designer(std::shared_ptr<Gateway> gateway, std::shared_ptr<const PaletteDB> palettes,
           ClassifyOptions options = {});

  // Throws DataInvalid (details carry the report) unless the data is clean.
  UploadResult upload(Session& s, std::string_view dataset_text, std::string_view value_field,
                      std::optional<nlohmann::json> geometry = std::nullopt,
                      std::string_view name_property = "name") const;

  void run_stage1(Session& s, int k) const;
  void select_method(Session& s, Method m) const;
  void set_scheme_type(Session& s, SchemeType t) const;
  void run_stage2(Session& s, std::string_view intent) const;
  void run_stage3(Session& s) const;
  void apply_patch(Session& s, const Patch& p) const;
  void set_active(Session& s, ActiveScheme a) const;
  ChatOutcome chat(Session& s, std::string_view utterance) const;

  const PaletteDB& palettes() const { return *palettes_; }
  const ClassifyOptions& options() const { return options_; }

 private:
  void refresh_scheme_checks(Session& s) const;

  std::shared_ptr<Gateway> gateway_;
  std::shared_ptr<const PaletteDB> palettes_;
  ClassifyOptions options_;
};

// The colours the map shows: the generated (or edited) scheme, or the matched
// palette when that is active. Throws StageIncomplete before stage 3.
ColorScheme displayed_scheme(const Session& s);

struct LegendEntry {
  std::string range;
  std::string color;
};

struct StyledMap {
  nlohmann::json features;  // FeatureCollection
  std::vector<LegendEntry> legend;
  std::vector<std::string> unmatched;
};

void to_json(nlohmann::json& j, const LegendEntry& e);
void to_json(nlohmann::json& j, const StyledMap& m);

// Up to two decimals, trailing zeros dropped.
std::string format_legend_number(double v);
std::vector<LegendEntry> build_legend(const ClassBreaks& breaks, const ColorScheme& scheme);

StyledMap render_styled_map(const Session& s, const nlohmann::json& features, std::string_view name_property);
// Uses the geometry stored with the session.
StyledMap render_styled_map(const Session& s);

// styled_map, legend, concept, scheme, transcript.
nlohmann::json export_bundle(const Session& s);
// Writes one file per bundle document.
void write_export_bundle(const nlohmann::json& bundle, const std::filesystem::path& dir);

class SessionStore {
 public:
  virtual ~SessionStore() = default;
  virtual std::optional<std::string> get(const std::string& id) const = 0;
  virtual void put(const std::string& id, const std::string& document) = 0;
};

class MemorySessionStore : public SessionStore {
 public:
  std::optional<std::string> get(const std::string& id) const override;
  void put(const std::string& id, const std::string& document) override;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> docs_;
};

// One <id>.json per session; writes go through a temporary file and rename.
class FileSessionStore : public SessionStore {
 public:
  explicit FileSessionStore(std::filesystem::path dir);
  std::optional<std::string> get(const std::string& id) const override;
  void put(const std::string& id, const std::string& document) override;

 private:
  std::filesystem::path dir_;
};

// 128 random bits as hex.
std::string new_session_id();

}  // namespace mapcolor
