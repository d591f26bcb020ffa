#pragma once

// Partition kernels shared by the data-driven classifiers. All of them work on
// the sorted distinct values with multiplicities, so tied values never land
// in different classes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mapcolor::kernels {

struct WeightedValues {
  std::vector<double> values;   // strictly increasing
  std::vector<double> weights;  // multiplicity of each value

  std::size_t size() const { return values.size(); }
};

WeightedValues collapse_ties(std::span<const double> sorted);

// Weighted prefix moments about the overall mean, for O(1) within-class sums
// of squares over any contiguous run of groups.
class PrefixMoments {
 public:
  explicit PrefixMoments(const WeightedValues& wv);

  double weight(std::size_t begin, std::size_t end) const { return w_[end] - w_[begin]; }
  double ssw(std::size_t begin, std::size_t end) const;
  double total() const { return ssw(0, w_.size() - 1); }

 private:
  std::vector<double> w_, s1_, s2_;
};

// A contiguous partition of the groups: class c covers [starts[c], starts[c+1])
// with an implicit end at the group count. starts[0] == 0.
struct Partition {
  std::vector<std::size_t> starts;
  double ssw = 0;
};

// Relative slack (times the total sum of squares) under which two candidate
// costs count as equal; the lower split index then wins.
inline constexpr double kTieTolerance = 1e-12;

// Exact minimum-SSW partition into k classes, the lexicographically smallest
// start vector among optima. Requires 1 <= k <= wv.size().
Partition fisher_jenks_serial(const WeightedValues& wv, int k);
Partition fisher_jenks_parallel(const WeightedValues& wv, int k);

double partition_ssw(const PrefixMoments& pm, std::span<const std::size_t> starts, std::size_t n);

// Repeatedly moves the single best boundary-adjacent group to the neighbouring
// class while that lowers SSW. Every class keeps at least min_weight members.
Partition improve_by_boundary_moves(const WeightedValues& wv, std::vector<std::size_t> starts,
                                    double min_weight, int max_iterations);

// Random contiguous seeding with every class holding >= min_weight members.
// Returns an empty vector when no such seeding exists.
std::vector<std::size_t> random_contiguous_seed(const WeightedValues& wv, int k, double min_weight,
                                                std::uint64_t seed);

// Class bounds from a partition: data min, midpoints between neighbouring
// classes, data max.
std::vector<double> bounds_from_partition(const WeightedValues& wv,
                                          std::span<const std::size_t> starts);

}  // namespace mapcolor::kernels
