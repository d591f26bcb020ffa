#include "mapcolor/kernels.hpp"

#include <omp.h>

#include <limits>
#include <stdexcept>

namespace mapcolor::kernels {

namespace {

// Rows of the DP are only read from the previous class count, so each row is
// filled in parallel over the start index. Small problems stay on one thread.
constexpr std::size_t kParallelThreshold = 256;

}  // namespace

Partition fisher_jenks_parallel(const WeightedValues& wv, int k) {
  const std::size_t m = wv.size();
  if (k < 1 || static_cast<std::size_t>(k) > m) throw std::invalid_argument("fisher_jenks: need 1 <= k <= groups");
  const PrefixMoments pm(wv);
  const double tol = kTieTolerance * pm.total();
  const auto kk = static_cast<std::size_t>(k);

  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
  // choice[(c - 2) * m + i]: first split after start i with c classes left.
  std::vector<std::size_t> choice((kk >= 2 ? kk - 1 : 0) * m, m);

  for (std::size_t i = 0; i < m; ++i) prev[i] = pm.ssw(i, m);

  for (std::size_t c = 2; c <= kk; ++c) {
    const auto last_start = static_cast<std::ptrdiff_t>(m - c);
    std::size_t* row = choice.data() + (c - 2) * m;
#pragma omp parallel for schedule(dynamic, 32) if (m >= kParallelThreshold)
    for (std::ptrdiff_t si = 0; si <= last_start; ++si) {
      const auto i = static_cast<std::size_t>(si);
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = m;
      const std::size_t last_j = m - (c - 1);
      for (std::size_t j = i + 1; j <= last_j; ++j) {
        const double cand = pm.ssw(i, j) + prev[j];
        if (cand < best - tol) {
          best = cand;
          best_j = j;
        }
      }
      cur[i] = best;
      row[i] = best_j;
    }
    prev.swap(cur);
  }

  Partition p;
  p.starts.push_back(0);
  std::size_t at = 0;
  for (std::size_t c = kk; c >= 2; --c) {
    at = choice[(c - 2) * m + at];
    p.starts.push_back(at);
  }
  p.ssw = partition_ssw(pm, p.starts, m);
  return p;
}

}  // namespace mapcolor::kernels
