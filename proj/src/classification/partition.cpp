#include "mapcolor/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mapcolor::kernels {

WeightedValues collapse_ties(std::span<const double> sorted) {
  WeightedValues wv;
  for (double v : sorted) {
    if (!wv.values.empty() && wv.values.back() == v) {
      wv.weights.back() += 1.0;
    } else {
      wv.values.push_back(v);
      wv.weights.push_back(1.0);
    }
  }
  return wv;
}

PrefixMoments::PrefixMoments(const WeightedValues& wv)
    : w_(wv.size() + 1, 0.0), s1_(wv.size() + 1, 0.0), s2_(wv.size() + 1, 0.0) {
  double total_w = 0, total = 0;
  for (std::size_t i = 0; i < wv.size(); ++i) {
    total_w += wv.weights[i];
    total += wv.weights[i] * wv.values[i];
  }
  // Centering keeps S2 - S1^2/W from cancelling catastrophically on data far
  // from zero.
  const double shift = total_w > 0 ? total / total_w : 0.0;
  for (std::size_t i = 0; i < wv.size(); ++i) {
    const double x = wv.values[i] - shift;
    w_[i + 1] = w_[i] + wv.weights[i];
    s1_[i + 1] = s1_[i] + wv.weights[i] * x;
    s2_[i + 1] = s2_[i] + wv.weights[i] * x * x;
  }
}

double PrefixMoments::ssw(std::size_t begin, std::size_t end) const {
  const double w = w_[end] - w_[begin];
  if (w <= 0) return 0.0;
  const double s1 = s1_[end] - s1_[begin];
  const double s2 = s2_[end] - s2_[begin];
  return std::max(0.0, s2 - s1 * s1 / w);
}

double partition_ssw(const PrefixMoments& pm, std::span<const std::size_t> starts, std::size_t n) {
  double total = 0;
  for (std::size_t c = 0; c < starts.size(); ++c) {
    const std::size_t end = c + 1 < starts.size() ? starts[c + 1] : n;
    total += pm.ssw(starts[c], end);
  }
  return total;
}

std::vector<double> bounds_from_partition(const WeightedValues& wv,
                                          std::span<const std::size_t> starts) {
  std::vector<double> bounds;
  bounds.reserve(starts.size() + 1);
  bounds.push_back(wv.values.front());
  for (std::size_t c = 1; c < starts.size(); ++c) {
    const double lo = wv.values[starts[c] - 1];
    const double hi = wv.values[starts[c]];
    double mid = lo + (hi - lo) / 2.0;
    if (!(mid > lo)) mid = hi;
    bounds.push_back(mid);
  }
  bounds.push_back(wv.values.back());
  return bounds;
}

std::vector<std::size_t> random_contiguous_seed(const WeightedValues& wv, int k, double min_weight,
                                                std::uint64_t seed) {
  const std::size_t m = wv.size();
  if (k < 1 || static_cast<std::size_t>(k) > m) return {};
  PrefixMoments pm(wv);

  // latest[r]: the largest start from which the suffix splits into r classes
  // of at least min_weight each.
  std::vector<std::ptrdiff_t> latest(static_cast<std::size_t>(k), -1);
  std::size_t end = m;
  for (int r = 1; r < k; ++r) {
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(end) - 1;
    while (j >= 0 && pm.weight(static_cast<std::size_t>(j), end) < min_weight) --j;
    if (j <= 0) return {};
    latest[static_cast<std::size_t>(r)] = j;
    end = static_cast<std::size_t>(j);
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> starts{0};
  std::size_t start = 0;
  for (int c = 0; c + 1 < k; ++c) {
    std::size_t lo = start + 1;
    while (lo < m && pm.weight(start, lo) < min_weight) ++lo;
    const auto hi = static_cast<std::size_t>(latest[static_cast<std::size_t>(k - 1 - c)]);
    if (lo > hi) return {};
    const std::size_t next = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
    starts.push_back(next);
    start = next;
  }
  if (pm.weight(start, m) < min_weight) return {};
  return starts;
}

}  // namespace mapcolor::kernels
