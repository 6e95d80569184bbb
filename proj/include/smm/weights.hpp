#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "smm/markov_core.hpp"
#include "smm/matrix.hpp"

namespace smm {

enum class Distance { l2, l1, linf };
enum class Kernel { gaussian, exponential };
enum class WeightKind { uniform, knn_kernel };

struct WeightScheme {
  WeightKind kind = WeightKind::knn_kernel;
  Distance distance = Distance::l2;
  /// gaussian: exp(-phi * dist^2); exponential: exp(-phi * dist).
  Kernel kernel = Kernel::gaussian;
  double phi = 100.0;
  int k = 3;

  static WeightScheme uniform() { return {WeightKind::uniform}; }
  static WeightScheme knn(int k, Distance distance, Kernel kernel, double phi) {
    return {WeightKind::knn_kernel, distance, kernel, phi, k};
  }

  /// Short stable name, e.g. "knn3-l2-gaussian-phi100" or "uniform".
  std::string name() const;
};

struct Edge {
  int first = 0;   // l1 < l2
  int second = 0;
  double weight = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected fusion graph over observed contexts. Edges are sorted by
/// (first, second) and carry strictly positive weights.
struct WeightGraph {
  int node_count = 0;
  std::vector<Edge> edges;

  double weight(int i, int j) const;  // 0 when absent
  /// Dense symmetric p' x p' weight matrix with zero diagonal.
  RealMatrix dense() const;
  /// Number of connected components, counting isolated nodes.
  int component_count() const;
};

std::string_view to_string(Distance d);
std::string_view to_string(Kernel k);
Distance parse_distance(std::string_view s);
Kernel parse_kernel(std::string_view s);

double distance(std::span<const double> a, std::span<const double> b,
                Distance metric);

/// Symmetric matrix of row-pairwise distances with zero diagonal.
RealMatrix pairwise_distances(const RealMatrix& rows, Distance metric);
/// Observed rows only.
RealMatrix pairwise_distances(const EmpiricalTransitions& pihat,
                              Distance metric);

/// Union kNN graph: (i, j) is an edge iff i is among j's k nearest or j among
/// i's. Ties are ordered by (distance, index). Returned pairs have i < j and
/// are sorted.
std::vector<std::pair<int, int>> knn_edges(const RealMatrix& dist, int k);

/// Indices of the k nearest neighbours of node i, ordered by (distance, index).
std::vector<int> nearest_neighbours(const RealMatrix& dist, int i, int k);

/// Throws DegenerateInput with fewer than two rows and InvalidArgument on an
/// invalid scheme (phi <= 0, k outside [1, p'-1]).
WeightGraph compute_weights(const RealMatrix& rows, const WeightScheme& scheme);
WeightGraph compute_weights(const EmpiricalTransitions& pihat,
                            const WeightScheme& scheme);

}  // namespace smm
