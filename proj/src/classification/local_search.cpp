#include "mapcolor/kernels.hpp"

namespace mapcolor::kernels {

Partition improve_by_boundary_moves(const WeightedValues& wv, std::vector<std::size_t> starts,
                                    double min_weight, int max_iterations) {
  const std::size_t m = wv.size();
  const PrefixMoments pm(wv);
  const double tol = kTieTolerance * pm.total();
  const std::size_t k = starts.size();
  auto class_end = [&](std::size_t c) { return c + 1 < k ? starts[c + 1] : m; };

  for (int iter = 0; iter < max_iterations; ++iter) {
    double best_gain = tol;
    std::size_t best_boundary = 0;
    std::size_t best_position = 0;

    for (std::size_t b = 1; b < k; ++b) {
      const std::size_t left_begin = starts[b - 1];
      const std::size_t right_end = class_end(b);
      const double before = pm.ssw(left_begin, starts[b]) + pm.ssw(starts[b], right_end);

      // Candidate positions for boundary b: one group to the left or right.
      for (int dir = -1; dir <= 1; dir += 2) {
        const std::size_t pos = dir < 0 ? starts[b] - 1 : starts[b] + 1;
        if (pos <= left_begin || pos >= right_end) continue;
        if (pm.weight(left_begin, pos) < min_weight || pm.weight(pos, right_end) < min_weight) continue;
        const double gain = before - (pm.ssw(left_begin, pos) + pm.ssw(pos, right_end));
        if (gain > best_gain) {
          best_gain = gain;
          best_boundary = b;
          best_position = pos;
        }
      }
    }
    if (best_boundary == 0) break;
    starts[best_boundary] = best_position;
  }

  Partition p;
  p.ssw = partition_ssw(pm, starts, m);
  p.starts = std::move(starts);
  return p;
}

}  // namespace mapcolor::kernels
