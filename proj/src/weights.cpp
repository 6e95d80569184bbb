#include "smm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "smm/errors.hpp"

namespace smm {

std::string_view to_string(Distance d) {
  switch (d) {
    case Distance::l2: return "l2";
    case Distance::l1: return "l1";
    case Distance::linf: return "linf";
  }
  return "?";
}

std::string_view to_string(Kernel k) {
  return k == Kernel::gaussian ? "gaussian" : "exponential";
}

Distance parse_distance(std::string_view s) {
  if (s == "l2") return Distance::l2;
  if (s == "l1") return Distance::l1;
  if (s == "linf") return Distance::linf;
  throw InvalidArgument("unknown distance '" + std::string(s) + "'");
}

Kernel parse_kernel(std::string_view s) {
  if (s == "gaussian") return Kernel::gaussian;
  if (s == "exponential") return Kernel::exponential;
  throw InvalidArgument("unknown kernel '" + std::string(s) + "'");
}

std::string WeightScheme::name() const {
  if (kind == WeightKind::uniform) return "uniform";
  std::ostringstream out;
  out << "knn" << k << '-' << to_string(distance) << '-' << to_string(kernel)
      << "-phi" << phi;
  return out.str();
}

double WeightGraph::weight(int i, int j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{i, j},
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return std::pair{e.first, e.second} < key;
                             });
  if (it != edges.end() && it->first == i && it->second == j) return it->weight;
  return 0.0;
}

RealMatrix WeightGraph::dense() const {
  const auto n = static_cast<std::size_t>(node_count);
  RealMatrix w(n, n, 0.0);
  for (const auto& e : edges) {
    w(e.first, e.second) = e.weight;
    w(e.second, e.first) = e.weight;
  }
  return w;
}

int WeightGraph::component_count() const {
  std::vector<int> parent(static_cast<std::size_t>(node_count));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = node_count;
  for (const auto& e : edges) {
    int a = find(e.first), b = find(e.second);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
      --components;
    }
  }
  return components;
}

double distance(std::span<const double> a, std::span<const double> b,
                Distance metric) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    switch (metric) {
      case Distance::l2: acc += diff * diff; break;
      case Distance::l1: acc += diff; break;
      case Distance::linf: acc = std::max(acc, diff); break;
    }
  }
  return metric == Distance::l2 ? std::sqrt(acc) : acc;
}

RealMatrix pairwise_distances(const RealMatrix& rows, Distance metric) {
  const std::size_t n = rows.rows();
  RealMatrix dist(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = distance(rows.row(i), rows.row(j), metric);
      dist(i, j) = v;
      dist(j, i) = v;
    }
  }
  return dist;
}

RealMatrix pairwise_distances(const EmpiricalTransitions& pihat,
                              Distance metric) {
  return pairwise_distances(pihat.observed_rows(), metric);
}

std::vector<int> nearest_neighbours(const RealMatrix& dist, int i, int k) {
  const int n = static_cast<int>(dist.rows());
  std::vector<int> others;
  others.reserve(static_cast<std::size_t>(n - 1));
  for (int j = 0; j < n; ++j) {
    if (j != i) others.push_back(j);
  }
  const auto kk = static_cast<std::size_t>(std::clamp(k, 0, n - 1));
  std::partial_sort(others.begin(), others.begin() + static_cast<long>(kk),
                    others.end(), [&](int a, int b) {
                      const double da = dist(i, a), db = dist(i, b);
                      return da < db || (da == db && a < b);
                    });
  others.resize(kk);
  return others;
}

std::vector<std::pair<int, int>> knn_edges(const RealMatrix& dist, int k) {
  const int n = static_cast<int>(dist.rows());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j : nearest_neighbours(dist, i, k)) {
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

WeightGraph compute_weights(const RealMatrix& rows, const WeightScheme& scheme) {
  const int n = static_cast<int>(rows.rows());
  if (n < 2) {
    throw DegenerateInput("need at least two observed contexts, got " +
                          std::to_string(n));
  }
  WeightGraph graph;
  graph.node_count = n;
  if (scheme.kind == WeightKind::uniform) {
    graph.edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) graph.edges.push_back({i, j, 1.0});
    }
    return graph;
  }
  if (!(scheme.phi > 0.0)) throw InvalidArgument("phi must be positive");
  if (scheme.k < 1) throw InvalidArgument("k must be at least 1");
  // k is clamped to p'-1 so small observed sets still get a complete graph.
  const int k = std::min(scheme.k, n - 1);
  const RealMatrix dist = pairwise_distances(rows, scheme.distance);
  for (auto [i, j] : knn_edges(dist, k)) {
    const double dd = dist(i, j);
    const double w = scheme.kernel == Kernel::gaussian
                         ? std::exp(-scheme.phi * dd * dd)
                         : std::exp(-scheme.phi * dd);
    // Underflowed weights are dropped; the edge set keeps w_l > 0.
    if (w > 0.0) graph.edges.push_back({i, j, w});
  }
  return graph;
}

WeightGraph compute_weights(const EmpiricalTransitions& pihat,
                            const WeightScheme& scheme) {
  return compute_weights(pihat.observed_rows(), scheme);
}

}  // namespace smm
