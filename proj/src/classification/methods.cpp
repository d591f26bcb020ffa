#include "mapcolor/classification.hpp"

#include "mapcolor/error.hpp"
#include "mapcolor/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace mapcolor {

using nlohmann::json;

namespace {

std::string method_label(Method m) { return std::string(method_token(m)); }

std::vector<double> checked_sorted(std::span<const double> values, int k, const ClassifyOptions& opts,
                                   Method m) {
  if (values.empty()) throw Error(Errc::DegenerateData, method_label(m) + ": no values");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::DegenerateData, method_label(m) + ": non-finite value");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw Error(Errc::DegenerateData, method_label(m) + ": all values are equal");
  }
  if (k < opts.min_k || k > opts.max_k) {
    throw Error(Errc::BadK,
                method_label(m) + ": class count " + std::to_string(k) + " outside [" +
                    std::to_string(opts.min_k) + ", " + std::to_string(opts.max_k) + "]",
                json{{"k", k}, {"min_k", opts.min_k}, {"max_k", opts.max_k}});
  }
  if (sorted.size() < static_cast<std::size_t>(k)) {
    throw Error(Errc::DegenerateData, method_label(m) + ": fewer values than classes");
  }
  return sorted;
}

kernels::WeightedValues distinct_groups(const std::vector<double>& sorted, int k, Method m) {
  auto wv = kernels::collapse_ties(sorted);
  if (wv.size() < static_cast<std::size_t>(k)) {
    throw Error(Errc::DegenerateData, method_label(m) + ": fewer distinct values than classes",
                json{{"distinct", wv.size()}, {"k", k}});
  }
  return wv;
}

// Element indices where each quantile class starts, moved up past tie runs.
// Returns an empty vector when ties leave fewer than k classes.
std::vector<std::size_t> quantile_starts(const std::vector<double>& sorted, int k) {
  const std::size_t n = sorted.size();
  std::vector<std::size_t> starts{0};
  for (int i = 1; i < k; ++i) {
    std::size_t s = std::max(static_cast<std::size_t>(i) * n / static_cast<std::size_t>(k), starts.back() + 1);
    while (s < n && sorted[s] == sorted[s - 1]) ++s;
    if (s >= n) return {};
    starts.push_back(s);
  }
  return starts;
}

std::vector<std::size_t> to_group_starts(const kernels::WeightedValues& wv, const std::vector<double>& sorted,
                                         const std::vector<std::size_t>& element_starts) {
  std::vector<std::size_t> out;
  out.reserve(element_starts.size());
  for (std::size_t s : element_starts) {
    const auto it = std::lower_bound(wv.values.begin(), wv.values.end(), sorted[s]);
    out.push_back(static_cast<std::size_t>(it - wv.values.begin()));
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double decimal_multiple(long long index, double mantissa, int exponent) {
  const double scaled = static_cast<double>(index) * mantissa;
  return exponent >= 0 ? scaled * std::pow(10.0, exponent) : scaled / std::pow(10.0, -exponent);
}

}  // namespace

std::string_view method_token(Method m) {
  switch (m) {
    case Method::EqualIntervals: return "equal_intervals";
    case Method::Quantiles: return "quantiles";
    case Method::JenksCaspall: return "jenks_caspall";
    case Method::FisherJenks: return "fisher_jenks";
    case Method::MaxP: return "max_p";
    case Method::PrettyBreaks: return "pretty_breaks";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view text) {
  std::string t(text);
  std::replace(t.begin(), t.end(), '-', '_');
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Method m : kMethodTieOrder) {
    if (method_token(m) == t) return m;
  }
  return std::nullopt;
}

ClassBreaks equal_intervals(std::span<const double> values, int k, const ClassifyOptions& opts) {
  const auto sorted = checked_sorted(values, k, opts, Method::EqualIntervals);
  const double lo = sorted.front(), hi = sorted.back();
  ClassBreaks b{Method::EqualIntervals, {}};
  b.bounds.reserve(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < k; ++i) b.bounds.push_back(lo + i * (hi - lo) / k);
  b.bounds.push_back(hi);
  return b;
}

ClassBreaks quantiles(std::span<const double> values, int k, const ClassifyOptions& opts) {
  const auto sorted = checked_sorted(values, k, opts, Method::Quantiles);
  const auto starts = quantile_starts(sorted, k);
  if (starts.empty()) {
    throw Error(Errc::TieCollapse, "quantiles: tied values leave fewer than " + std::to_string(k) + " classes");
  }
  const auto wv = kernels::collapse_ties(sorted);
  return {Method::Quantiles, kernels::bounds_from_partition(wv, to_group_starts(wv, sorted, starts))};
}

ClassBreaks jenks_caspall(std::span<const double> values, int k, const ClassifyOptions& opts) {
  const auto sorted = checked_sorted(values, k, opts, Method::JenksCaspall);
  const auto wv = distinct_groups(sorted, k, Method::JenksCaspall);
  std::vector<std::size_t> seed;
  if (auto qs = quantile_starts(sorted, k); !qs.empty()) {
    seed = to_group_starts(wv, sorted, qs);
  } else {
    for (int i = 0; i < k; ++i) seed.push_back(static_cast<std::size_t>(i) * wv.size() / static_cast<std::size_t>(k));
  }
  const auto p = kernels::improve_by_boundary_moves(wv, std::move(seed), 0.0, opts.jenks_caspall_max_iterations);
  return {Method::JenksCaspall, kernels::bounds_from_partition(wv, p.starts)};
}

ClassBreaks fisher_jenks(std::span<const double> values, int k, const ClassifyOptions& opts) {
  const auto sorted = checked_sorted(values, k, opts, Method::FisherJenks);
  const auto wv = distinct_groups(sorted, k, Method::FisherJenks);
  const auto p = kernels::fisher_jenks_parallel(wv, k);
  return {Method::FisherJenks, kernels::bounds_from_partition(wv, p.starts)};
}

ClassBreaks max_p(std::span<const double> values, int k, std::uint64_t seed, const ClassifyOptions& opts) {
  const auto sorted = checked_sorted(values, k, opts, Method::MaxP);
  if (sorted.size() < 3 * static_cast<std::size_t>(k)) {
    throw Error(Errc::TooFewValues, "max_p: needs at least 3k values",
                json{{"n", sorted.size()}, {"k", k}});
  }
  const auto wv = distinct_groups(sorted, k, Method::MaxP);
  const double min_weight =
      std::max(1.0, std::floor(static_cast<double>(sorted.size()) / (3.0 * k)));
  const int restarts = std::max(1, opts.max_p_restarts);

  std::vector<kernels::Partition> found(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < restarts; ++r) {
    const auto rseed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r)));
    auto starts = kernels::random_contiguous_seed(wv, k, min_weight, rseed);
    if (!starts.empty()) {
      found[static_cast<std::size_t>(r)] =
          kernels::improve_by_boundary_moves(wv, std::move(starts), min_weight, opts.jenks_caspall_max_iterations);
    }
  }

  const kernels::Partition* best = nullptr;
  for (const auto& p : found) {
    if (!p.starts.empty() && (best == nullptr || p.ssw < best->ssw)) best = &p;
  }
  if (best == nullptr) {
    throw Error(Errc::DegenerateData, "max_p: tied values prevent " + std::to_string(k) +
                                          " groups of at least " + std::to_string(static_cast<int>(min_weight)) +
                                          " members");
  }
  return {Method::MaxP, kernels::bounds_from_partition(wv, best->starts)};
}

ClassBreaks pretty_breaks(std::span<const double> values, int k, const ClassifyOptions& opts) {
  const auto sorted = checked_sorted(values, k, opts, Method::PrettyBreaks);
  const double lo = sorted.front(), hi = sorted.back();
  const double raw_step = (hi - lo) / k;
  const int exponent = static_cast<int>(std::floor(std::log10(raw_step)));

  struct Candidate {
    double mantissa;
    int exponent;
    double step;
  };
  std::vector<Candidate> candidates;
  for (int e = exponent - 1; e <= exponent + 1; ++e) {
    for (double mant : {1.0, 2.0, 2.5, 5.0, 10.0}) {
      candidates.push_back({mant, e, decimal_multiple(1, mant, e)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    const double da = std::abs(a.step - raw_step), db = std::abs(b.step - raw_step);
    return da != db ? da < db : a.step < b.step;
  });

  // Allow between k-2 and k classes (never below the configured minimum);
  // more than k would let a coarse rule out-score the optimal classifier.
  const int fewest = std::max(opts.min_k, k - 2);
  for (const auto& c : candidates) {
    auto first = static_cast<long long>(std::floor(lo / c.step));
    auto last = static_cast<long long>(std::ceil(hi / c.step));
    while (decimal_multiple(first, c.mantissa, c.exponent) > lo) --first;
    while (decimal_multiple(last, c.mantissa, c.exponent) < hi) ++last;
    const long long classes = last - first;
    if (classes < fewest || classes > k) continue;
    ClassBreaks b{Method::PrettyBreaks, {}};
    for (long long i = first; i <= last; ++i) b.bounds.push_back(decimal_multiple(i, c.mantissa, c.exponent));
    return b;
  }
  throw Error(Errc::DegenerateData, "pretty_breaks: no neat step yields between " + std::to_string(fewest) +
                                        " and " + std::to_string(k) + " classes");
}

ClassBreaks classify(Method method, std::span<const double> values, int k, const ClassifyOptions& opts) {
  switch (method) {
    case Method::EqualIntervals: return equal_intervals(values, k, opts);
    case Method::Quantiles: return quantiles(values, k, opts);
    case Method::JenksCaspall: return jenks_caspall(values, k, opts);
    case Method::FisherJenks: return fisher_jenks(values, k, opts);
    case Method::MaxP: return max_p(values, k, opts.seed, opts);
    case Method::PrettyBreaks: return pretty_breaks(values, k, opts);
  }
  throw Error(Errc::Internal, "unknown method");
}

int class_index(double v, const ClassBreaks& breaks) {
  const auto& b = breaks.bounds;
  if (b.size() < 2 || !(v >= b.front() && v <= b.back())) {
    throw Error(Errc::ValueOutOfRange, "value outside class bounds", json{{"value", v}});
  }
  const auto it = std::upper_bound(b.begin(), b.end(), v);
  const auto idx = static_cast<int>(it - b.begin()) - 1;
  return std::min(idx, breaks.k() - 1);
}

double sst(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double total = 0;
  for (double v : values) total += (v - mean) * (v - mean);
  return total;
}

double ssw(std::span<const double> values, const ClassBreaks& breaks) {
  const auto k = static_cast<std::size_t>(breaks.k());
  std::vector<int> cls(values.size());
  std::vector<double> sums(k, 0.0);
  std::vector<int> counts(k, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    cls[i] = class_index(values[i], breaks);
    sums[static_cast<std::size_t>(cls[i])] += values[i];
    ++counts[static_cast<std::size_t>(cls[i])];
  }
  double total = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto c = static_cast<std::size_t>(cls[i]);
    const double d = values[i] - sums[c] / counts[c];
    total += d * d;
  }
  return total;
}

double gvf(std::span<const double> values, const ClassBreaks& breaks) {
  const double total = sst(values);
  if (!(total > 0)) throw Error(Errc::DegenerateData, "gvf: total sum of squares is zero");
  const double within = ssw(values, breaks);
  return std::clamp(100.0 - within / total * 100.0, 0.0, 100.0);
}

ClassificationResult evaluate(std::span<const double> values, const ClassBreaks& breaks) {
  ClassificationResult r;
  r.breaks = breaks;
  r.gvf = gvf(values, breaks);
  const auto k = static_cast<std::size_t>(breaks.k());
  r.class_counts.assign(k, 0);
  std::vector<double> sums(k, 0.0);
  for (double v : values) {
    const auto c = static_cast<std::size_t>(class_index(v, breaks));
    ++r.class_counts[c];
    sums[c] += v;
  }
  r.class_means.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    // Empty classes (possible for interval rules) report their midpoint.
    r.class_means[c] = r.class_counts[c] > 0 ? sums[c] / r.class_counts[c]
                                             : (breaks.bounds[c] + breaks.bounds[c + 1]) / 2.0;
  }
  return r;
}

RankedClassifications classify_all(std::span<const double> values, int k, const ClassifyOptions& opts) {
  constexpr std::size_t kMethods = std::size(kMethodTieOrder);
  std::array<std::optional<ClassificationResult>, kMethods> slots;
  std::array<std::string, kMethods> failures;

  // A bad k is the caller's mistake, not a per-method failure.
  if (k < opts.min_k || k > opts.max_k) {
    throw Error(Errc::BadK,
                "class count " + std::to_string(k) + " outside [" + std::to_string(opts.min_k) + ", " +
                    std::to_string(opts.max_k) + "]",
                json{{"k", k}, {"min_k", opts.min_k}, {"max_k", opts.max_k}});
  }

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < kMethods; ++i) {
    const Method m = kMethodTieOrder[i];
    try {
      slots[i] = evaluate(values, classify(m, values, k, opts));
    } catch (const Error& e) {
      failures[i] = std::string(method_token(m)) + " omitted: " + std::string(token(e.code())) + ": " + e.what();
    }
  }

  RankedClassifications ranked;
  for (std::size_t i = 0; i < kMethods; ++i) {
    if (slots[i]) {
      ranked.results.push_back(std::move(*slots[i]));
    } else {
      ranked.notes.push_back(failures[i]);
    }
  }
  if (ranked.results.empty()) {
    throw Error(Errc::AllMethodsFailed, "no classification method succeeded", json{{"notes", ranked.notes}});
  }
  std::stable_sort(ranked.results.begin(), ranked.results.end(),
                   [](const ClassificationResult& a, const ClassificationResult& b) { return a.gvf > b.gvf; });
  return ranked;
}

std::map<std::string, int> assign_classes(const Dataset& d, const ClassBreaks& breaks) {
  std::map<std::string, int> out;
  for (const auto& r : d.records) {
    if (!r.value) throw Error(Errc::DataInvalid, "record \"" + r.name + "\" has no usable value");
    out[r.name] = class_index(*r.value, breaks);
  }
  return out;
}

void to_json(json& j, const ClassBreaks& b) {
  j = json{{"method", method_token(b.method)}, {"k", b.k()}, {"bounds", b.bounds}};
}

void from_json(const json& j, ClassBreaks& b) {
  const auto m = parse_method(j.at("method").get<std::string>());
  if (!m) throw Error(Errc::MalformedInput, "unknown classification method");
  b.method = *m;
  b.bounds = j.at("bounds").get<std::vector<double>>();
}

void to_json(json& j, const ClassificationResult& r) {
  j = r.breaks;
  j["gvf"] = r.gvf;
  j["class_counts"] = r.class_counts;
  j["class_means"] = r.class_means;
}

void from_json(const json& j, ClassificationResult& r) {
  r.breaks = j.get<ClassBreaks>();
  r.gvf = j.at("gvf").get<double>();
  r.class_counts = j.at("class_counts").get<std::vector<int>>();
  r.class_means = j.at("class_means").get<std::vector<double>>();
}

}  // namespace mapcolor
