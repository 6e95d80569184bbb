#pragma once

#include <span>
#include <vector>

#include "smm/matrix.hpp"

namespace smm {

/// Cross-tabulation of two labelings of the same elements.
struct ContingencyTable {
  CountMatrix cells;             // p_ij = |X_i ∩ Y_j|
  std::vector<long long> rows;   // a_i
  std::vector<long long> cols;   // b_j
  long long total = 0;           // p
};

/// Labels may be arbitrary integers; they are compacted internally. Throws
/// MismatchedElements when the lengths differ.
ContingencyTable contingency_table(std::span<const int> x,
                                   std::span<const int> y);

/// (agreeing-same + agreeing-different pairs) / C(p, 2). Requires p >= 2.
double rand_index(std::span<const int> x, std::span<const int> y);

/// Chance-corrected Rand index. When the denominator vanishes (both
/// partitions all-singletons or both one cluster) the partitions are
/// necessarily identical and 1 is returned.
double adjusted_rand_index(std::span<const int> x, std::span<const int> y);

/// True when the two labelings induce the same partition.
bool same_partition(std::span<const int> x, std::span<const int> y);

}  // namespace smm
