// Batch driver: classify a dataset, run the whole design pipeline, or lint a
// hand-written scheme.
#include "mapcolor/classification.hpp"
#include "mapcolor/concept.hpp"
#include "mapcolor/data_model.hpp"
#include "mapcolor/error.hpp"
#include "mapcolor/llm_gateway.hpp"
#include "mapcolor/palette_db.hpp"
#include "mapcolor/session.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mapcolor;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kLintErrors = 1, kInputError = 2, kProviderError = 3 };

int exit_code(Errc code) {
  switch (code) {
    case Errc::FixtureMiss:
    case Errc::ProviderError:
    case Errc::RateLimited:
    case Errc::Timeout:
    case Errc::UnparseableResponse:
    case Errc::BadSchemeType:
    case Errc::WrongColorCount:
    case Errc::ConceptInvalid:
    case Errc::Internal:
      return kProviderError;
    default:
      return kInputError;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MalformedInput, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> clean_values(const Dataset& d) {
  const auto report = validate_dataset(d);
  if (!report.is_clean) {
    throw Error(Errc::DataInvalid, "the data has missing, duplicate or non-numeric entries", {{"report", report}});
  }
  return d.values();
}

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

void print_table(const std::vector<ClassificationResult>& rows) {
  std::printf("%-16s %3s %9s  %s\n", "method", "k", "gvf", "bounds");
  for (const auto& r : rows) {
    std::string bounds;
    for (double b : r.breaks.bounds) bounds += (bounds.empty() ? "" : " ") + fmt(b, 10);
    std::printf("%-16s %3d %9.4f  %s\n", std::string(method_token(r.breaks.method)).c_str(), r.breaks.k(), r.gvf,
                bounds.c_str());
  }
}

struct ClassifyArgs {
  std::string data, field, method;
  int k = 0;
};

int run_classify(const ClassifyArgs& a, bool as_json) {
  const auto values = clean_values(parse_dataset(read_file(a.data), a.field));
  std::vector<ClassificationResult> rows;
  std::vector<std::string> notes;
  if (!a.method.empty()) {
    const auto m = parse_method(a.method);
    if (!m) throw Error(Errc::BadRequest, "unknown method \"" + a.method + "\"");
    rows.push_back(evaluate(values, classify(*m, values, a.k)));
  } else {
    auto ranked = classify_all(values, a.k);
    rows = std::move(ranked.results);
    notes = std::move(ranked.notes);
  }
  if (as_json) {
    std::cout << json{{"results", rows}, {"notes", notes}}.dump(2) << "\n";
  } else {
    print_table(rows);
    for (const auto& n : notes) std::cout << "note: " << n << "\n";
  }
  return kOk;
}

struct DesignArgs {
  std::string data, field, intent, fixtures, geo, name_prop = "name", out;
  int k = 0;
  bool offline = false;
};

int run_design(const DesignArgs& a, bool as_json) {
  ProviderConfig cfg = ProviderConfig::from_env();
  std::shared_ptr<LlmBackend> backend;
  if (a.offline) {
    backend = std::make_shared<FixtureBackend>(a.fixtures.empty() ? default_data_dir() / "fixtures" / "llm"
                                                                  : std::filesystem::path(a.fixtures));
  } else {
    backend = std::make_shared<HttpBackend>();
  }
  auto palettes = std::make_shared<const PaletteDB>(PaletteDB::load(default_data_dir() / "colorbrewer.json"));
  Designer designer(std::make_shared<Gateway>(cfg, backend), palettes);

  json geometry;
  try {
    geometry = json::parse(read_file(a.geo));
  } catch (const json::parse_error& e) {
    throw Error(Errc::InvalidGeoJSON, std::string("geometry file is not JSON: ") + e.what());
  }
  Session s;
  designer.upload(s, read_file(a.data), a.field, std::optional<json>(std::move(geometry)), a.name_prop);
  designer.run_stage1(s, a.k);
  designer.run_stage2(s, a.intent);
  designer.run_stage3(s);
  const json bundle = export_bundle(s);
  write_export_bundle(bundle, a.out);

  const auto& lint = *s.lint;
  if (as_json) {
    std::cout << json{{"out", a.out},
                      {"method", method_token(s.classification->selected)},
                      {"concept", bundle["concept"]},
                      {"scheme", bundle["scheme"]}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "method: " << method_token(s.classification->selected) << "\n";
    std::cout << "concept: " << bundle["concept"].dump() << "\n";
    std::cout << "scheme:";
    for (const auto& c : bundle["scheme"]["colors"]) std::cout << " " << c.get<std::string>();
    std::cout << "\n";
    if (s.match) {
      std::cout << "closest ColorBrewer: " << s.match->palette.name << (s.match->reversed ? " (reversed)" : "")
                << ", mean delta E " << fmt(s.match->distance, 4) << "\n";
    }
    for (const auto& f : lint.findings) std::cout << f.rule << " " << (f.severity == Severity::Error ? "error" : "warning") << ": " << f.message << "\n";
    std::cout << "wrote " << a.out << "\n";
  }
  return kOk;
}

struct LintArgs {
  std::string scheme, type;
};

int run_lint(const LintArgs& a, bool as_json) {
  ColorScheme s;
  const auto type = parse_scheme_type(a.type);
  if (!type) throw Error(Errc::BadRequest, "--type must be sequential or diverging");
  s.scheme_type = *type;
  std::stringstream in(a.scheme);
  for (std::string hex; std::getline(in, hex, ',');) s.colors.push_back(parse_hex(trim(hex)));
  if (s.colors.empty()) throw Error(Errc::BadRequest, "no colours given");
  const auto report = lint_scheme(s);
  if (as_json) {
    std::cout << json(report).dump(2) << "\n";
  } else if (report.clean()) {
    std::cout << "clean\n";
  } else {
    for (const auto& f : report.findings) {
      std::cout << f.rule << " " << (f.severity == Severity::Error ? "error" : "warning") << ": " << f.message
                << "\n";
    }
  }
  return report.has_errors() ? kLintErrors : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Choropleth colour design from the command line"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("classify", "Compare classification methods");
  classify_cmd->add_option("--data", ca.data, "Dataset JSON file")->required();
  classify_cmd->add_option("--field", ca.field, "Value field")->required();
  classify_cmd->add_option("--k", ca.k, "Number of classes")->required();
  classify_cmd->add_option("--method", ca.method, "Run a single method");
  classify_cmd->add_flag("--json", as_json, "Machine-readable output");

  DesignArgs da;
  auto* design_cmd = app.add_subcommand("design", "Run the three design stages and write an export bundle");
  design_cmd->add_option("--data", da.data, "Dataset JSON file")->required();
  design_cmd->add_option("--field", da.field, "Value field")->required();
  design_cmd->add_option("--k", da.k, "Number of classes")->required();
  design_cmd->add_option("--intent", da.intent, "Design intent in plain words")->required();
  design_cmd->add_flag("--offline", da.offline, "Replay recorded LLM responses");
  design_cmd->add_option("--fixtures", da.fixtures, "Recorded response directory");
  design_cmd->add_option("--geo", da.geo, "GeoJSON FeatureCollection")->required();
  design_cmd->add_option("--name-prop", da.name_prop, "Feature property holding the region name");
  design_cmd->add_option("--out", da.out, "Output directory")->required();
  design_cmd->add_flag("--json", as_json, "Machine-readable output");

  LintArgs la;
  auto* lint_cmd = app.add_subcommand("lint", "Check a scheme against the cartographic rules");
  lint_cmd->add_option("--scheme", la.scheme, "Comma-separated hex colours, lowest class first")->required();
  lint_cmd->add_option("--type", la.type, "sequential or diverging")->required();
  lint_cmd->add_flag("--json", as_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*classify_cmd) return run_classify(ca, as_json);
    if (*design_cmd) return run_design(da, as_json);
    return run_lint(la, as_json);
  } catch (const Error& e) {
    if (as_json) {
      std::cout << json{{"error", {{"code", token(e.code())}, {"message", e.what()}, {"details", e.details()}}}}.dump(2)
                << "\n";
    }
    std::cerr << "error: " << token(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
