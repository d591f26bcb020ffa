#pragma once

#include "mapcolor/data_model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mapcolor {

enum class Method { EqualIntervals, Quantiles, JenksCaspall, FisherJenks, MaxP, PrettyBreaks };

// Ranking tie order for classify_all.
inline constexpr Method kMethodTieOrder[] = {Method::FisherJenks, Method::JenksCaspall,
                                             Method::MaxP,        Method::Quantiles,
                                             Method::EqualIntervals, Method::PrettyBreaks};

std::string_view method_token(Method m);
// Accepts the snake_case token or its hyphenated form ("fisher-jenks").
std::optional<Method> parse_method(std::string_view text);

// Class i holds v with bounds[i] <= v < bounds[i+1]; the last class is closed
// at bounds[k].
struct ClassBreaks {
  Method method = Method::FisherJenks;
  std::vector<double> bounds;

  int k() const { return bounds.empty() ? 0 : static_cast<int>(bounds.size()) - 1; }
  bool operator==(const ClassBreaks&) const = default;
};

struct ClassificationResult {
  ClassBreaks breaks;
  double gvf = 0;
  std::vector<int> class_counts;
  std::vector<double> class_means;
};

struct ClassifyOptions {
  int min_k = 3;
  int max_k = 11;
  std::uint64_t seed = 0;
  int jenks_caspall_max_iterations = 1000;
  int max_p_restarts = 8;
};

// GVF at or above this is considered a satisfactorily accurate classification.
inline constexpr double kPublicationGvfThreshold = 95.0;

ClassBreaks equal_intervals(std::span<const double> values, int k, const ClassifyOptions& opts = {});
ClassBreaks quantiles(std::span<const double> values, int k, const ClassifyOptions& opts = {});
ClassBreaks jenks_caspall(std::span<const double> values, int k, const ClassifyOptions& opts = {});
ClassBreaks fisher_jenks(std::span<const double> values, int k, const ClassifyOptions& opts = {});
ClassBreaks max_p(std::span<const double> values, int k, std::uint64_t seed,
                  const ClassifyOptions& opts = {});
ClassBreaks pretty_breaks(std::span<const double> values, int k, const ClassifyOptions& opts = {});

// Dispatches to the method; max_p takes its seed from opts.
ClassBreaks classify(Method method, std::span<const double> values, int k,
                     const ClassifyOptions& opts = {});

// Throws ValueOutOfRange when v lies outside [bounds.front(), bounds.back()].
int class_index(double v, const ClassBreaks& breaks);

double ssw(std::span<const double> values, const ClassBreaks& breaks);
double sst(std::span<const double> values);
double gvf(std::span<const double> values, const ClassBreaks& breaks);

ClassificationResult evaluate(std::span<const double> values, const ClassBreaks& breaks);

struct RankedClassifications {
  std::vector<ClassificationResult> results;  // GVF descending
  std::vector<std::string> notes;             // one per omitted method
};

RankedClassifications classify_all(std::span<const double> values, int k,
                                   const ClassifyOptions& opts = {});

std::map<std::string, int> assign_classes(const Dataset& d, const ClassBreaks& breaks);

void to_json(nlohmann::json& j, const ClassBreaks& b);
void from_json(const nlohmann::json& j, ClassBreaks& b);
void to_json(nlohmann::json& j, const ClassificationResult& r);
void from_json(const nlohmann::json& j, ClassificationResult& r);

}  // namespace mapcolor
