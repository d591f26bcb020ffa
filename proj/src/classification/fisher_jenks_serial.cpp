// Reference dynamic program, kept deliberately plain. Tests check the OpenMP
// kernel against it; production code calls fisher_jenks_parallel.

#include "mapcolor/kernels.hpp"

#include <limits>
#include <stdexcept>

namespace mapcolor::kernels {

Partition fisher_jenks_serial(const WeightedValues& wv, int k) {
  const std::size_t m = wv.size();
  if (k < 1 || static_cast<std::size_t>(k) > m) throw std::invalid_argument("fisher_jenks: need 1 <= k <= groups");
  const PrefixMoments pm(wv);
  const double tol = kTieTolerance * pm.total();
  const auto kk = static_cast<std::size_t>(k);

  // cost[c][i]: least SSW splitting groups [i, m) into c classes.
  std::vector<std::vector<double>> cost(kk + 1, std::vector<double>(m + 1, 0.0));
  std::vector<std::vector<std::size_t>> next(kk + 1, std::vector<std::size_t>(m + 1, m));
  for (std::size_t i = 0; i < m; ++i) cost[1][i] = pm.ssw(i, m);

  for (std::size_t c = 2; c <= kk; ++c) {
    for (std::size_t i = 0; i + c <= m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = m;
      for (std::size_t j = i + 1; j + (c - 1) <= m; ++j) {
        const double cand = pm.ssw(i, j) + cost[c - 1][j];
        if (cand < best - tol) {
          best = cand;
          best_j = j;
        }
      }
      cost[c][i] = best;
      next[c][i] = best_j;
    }
  }

  Partition p;
  p.starts.push_back(0);
  std::size_t at = 0;
  for (std::size_t c = kk; c >= 2; --c) {
    at = next[c][at];
    p.starts.push_back(at);
  }
  p.ssw = partition_ssw(pm, p.starts, m);
  return p;
}

}  // namespace mapcolor::kernels
