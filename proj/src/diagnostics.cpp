#include "smm/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "smm/errors.hpp"

namespace smm {

namespace {

int cluster_count(std::span<const int> partition) {
  int k = 0;
  for (int v : partition) {
    if (v < 0) throw InvalidArgument("partition labels must be nonnegative");
    k = std::max(k, v + 1);
  }
  return k;
}

void require_cover(const WeightGraph& weights, std::span<const int> partition) {
  if (partition.size() != static_cast<std::size_t>(weights.node_count)) {
    throw InvalidArgument("partition must cover every graph node");
  }
}

// Scaled cross-cluster weight of the pair (alpha, beta).
double cross_scale(const WeightAggregates& agg, int alpha, int beta) {
  auto outgoing = [&](int c) {
    double s = 0.0;
    for (int l = 0; l < agg.clusters; ++l) {
      if (l != c) s += agg.cluster_to_cluster(c, l);
    }
    return s / agg.sizes[static_cast<std::size_t>(c)];
  };
  return outgoing(alpha) + outgoing(beta);
}

}  // namespace

WeightAggregates weight_aggregates(const WeightGraph& weights,
                                   std::span<const int> partition) {
  require_cover(weights, partition);
  WeightAggregates agg;
  agg.clusters = cluster_count(partition);
  const auto k0 = static_cast<std::size_t>(agg.clusters);
  agg.sizes.assign(k0, 0);
  for (int v : partition) ++agg.sizes[static_cast<std::size_t>(v)];
  agg.node_to_cluster = RealMatrix(partition.size(), k0, 0.0);
  agg.cluster_to_cluster = RealMatrix(k0, k0, 0.0);
  for (const auto& e : weights.edges) {
    const int ci = partition[static_cast<std::size_t>(e.first)];
    const int cj = partition[static_cast<std::size_t>(e.second)];
    agg.node_to_cluster(e.first, cj) += e.weight;
    agg.node_to_cluster(e.second, ci) += e.weight;
    if (ci != cj) {
      agg.cluster_to_cluster(ci, cj) += e.weight;
      agg.cluster_to_cluster(cj, ci) += e.weight;
    }
  }
  return agg;
}

double cross_weight_imbalance(const WeightAggregates& agg, int i, int j,
                              int alpha) {
  double mu = 0.0;
  for (int beta = 0; beta < agg.clusters; ++beta) {
    if (beta == alpha) continue;
    mu += std::abs(agg.node_to_cluster(i, beta) - agg.node_to_cluster(j, beta));
  }
  return mu;
}

ConditionCheck check_conditions(const WeightGraph& weights,
                                std::span<const int> partition) {
  const WeightAggregates agg = weight_aggregates(weights, partition);
  ConditionCheck out;
  const int n = weights.node_count;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int alpha = partition[static_cast<std::size_t>(i)];
      if (partition[static_cast<std::size_t>(j)] != alpha) continue;
      const double w = weights.weight(i, j);
      if (!(w > 0.0)) {
        out.a1 = false;
        ++out.a1_violations;
      }
      const double margin = agg.sizes[static_cast<std::size_t>(alpha)] * w -
                            cross_weight_imbalance(agg, i, j, alpha);
      out.min_margin = std::min(out.min_margin, margin);
      if (!(margin > 0.0)) {
        out.a2 = false;
        ++out.a2_violations;
      }
    }
  }
  return out;
}

LambdaBounds lambda_bounds(const RealMatrix& pihat, const WeightGraph& weights,
                           std::span<const int> partition) {
  const WeightAggregates agg = weight_aggregates(weights, partition);
  if (pihat.rows() != partition.size()) {
    throw InvalidArgument("pihat rows must match the partition");
  }
  const std::size_t d = pihat.cols();
  LambdaBounds out;
  const int n = weights.node_count;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int alpha = partition[static_cast<std::size_t>(i)];
      if (partition[static_cast<std::size_t>(j)] != alpha) continue;
      const double margin =
          agg.sizes[static_cast<std::size_t>(alpha)] * weights.weight(i, j) -
          cross_weight_imbalance(agg, i, j, alpha);
      if (!(margin > 0.0)) {
        throw UndefinedBound("lambda_min undefined: within-cluster margin <= 0");
      }
      const double spread = distance(pihat.row(static_cast<std::size_t>(i)),
                                     pihat.row(static_cast<std::size_t>(j)),
                                     Distance::l2);
      out.lambda_min = std::max(out.lambda_min, spread / margin);
    }
  }

  RealMatrix means(static_cast<std::size_t>(agg.clusters), d, 0.0);
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const auto c = static_cast<std::size_t>(partition[i]);
    for (std::size_t a = 0; a < d; ++a) means(c, a) += pihat(i, a) / agg.sizes[c];
  }
  for (int alpha = 0; alpha < agg.clusters; ++alpha) {
    for (int beta = alpha + 1; beta < agg.clusters; ++beta) {
      const double denom = cross_scale(agg, alpha, beta);
      if (!(denom > 0.0)) continue;
      const double gap = distance(means.row(static_cast<std::size_t>(alpha)),
                                  means.row(static_cast<std::size_t>(beta)),
                                  Distance::l2);
      out.lambda_max = std::min(out.lambda_max, gap / denom);
    }
  }
  return out;
}

SeparationStats separation_stats(const RealMatrix& group_probs,
                                 const WeightGraph& weights,
                                 std::span<const int> partition) {
  const WeightAggregates agg = weight_aggregates(weights, partition);
  const int k0 = static_cast<int>(group_probs.rows());
  if (k0 < 2 || agg.clusters < 2) {
    throw SingleCluster("separation needs at least two clusters");
  }
  if (agg.clusters != k0) {
    throw InvalidArgument("group vectors do not match the partition");
  }
  SeparationStats out;
  out.delta = kInfinity;
  for (int a = 0; a < k0; ++a) {
    for (int b = a + 1; b < k0; ++b) {
      out.delta = std::min(
          out.delta, distance(group_probs.row(static_cast<std::size_t>(a)),
                              group_probs.row(static_cast<std::size_t>(b)),
                              Distance::l2));
    }
  }
  out.delta1 = check_conditions(weights, partition).min_margin;
  out.delta2 = 0.0;
  for (int a = 0; a < k0; ++a) {
    for (int b = a + 1; b < k0; ++b) {
      out.delta2 = std::max(out.delta2, cross_scale(agg, a, b));
    }
  }
  return out;
}

namespace {

KernelBounds kernel_bounds_at(double phi, int k, std::span<const int> sizes,
                              double delta, const double* epsilon) {
  if (sizes.empty()) throw InvalidArgument("no cluster sizes");
  if (!(phi > 0.0) || !(delta > 0.0)) {
    throw PreconditionViolated("phi and delta must be positive");
  }
  const int p_min = *std::min_element(sizes.begin(), sizes.end());
  const int p_max = *std::max_element(sizes.begin(), sizes.end());
  if (k < p_max - 1) {
    throw PreconditionViolated("k = " + std::to_string(k) +
                               " is below p_max - 1 = " +
                               std::to_string(p_max - 1));
  }
  KernelBounds out;
  const int excess = k + 1 - p_min;  // >= 0 by the precondition
  if (excess == 0) {
    out.epsilon_max = kInfinity;
  } else {
    const double ratio = static_cast<double>(k + 1) / p_min - 1.0;
    out.epsilon_max =
        delta / 2.0 - std::log(2.0 * ratio) / (2.0 * phi * delta);
  }
  const double eps = epsilon != nullptr ? *epsilon : out.epsilon_max;
  const double cross =
      excess == 0 ? 0.0 : 2.0 * excess * std::exp(-phi * std::pow(delta - eps, 2));
  out.delta2_max = cross;
  out.delta1_min =
      (std::isinf(eps) ? 0.0 : p_min * std::exp(-phi * eps * eps)) - cross;

  int total = 0;
  for (int s : sizes) total += s;
  const bool balanced = p_min == p_max;
  out.balanced_optimal_k =
      balanced && k == total / static_cast<int>(sizes.size()) - 1;
  return out;
}

}  // namespace

KernelBounds kernel_knn_bounds(double phi, int k, std::span<const int> sizes,
                               double delta) {
  return kernel_bounds_at(phi, k, sizes, delta, nullptr);
}

KernelBounds kernel_knn_bounds(double phi, int k, std::span<const int> sizes,
                               double delta, double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be nonnegative");
  return kernel_bounds_at(phi, k, sizes, delta, &epsilon);
}

RecoveryReport recovery_report(const RealMatrix& pihat,
                               const WeightGraph& weights,
                               std::span<const int> partition,
                               const RealMatrix* group_probs,
                               const WeightScheme* scheme) {
  RecoveryReport report;
  report.aggregates = weight_aggregates(weights, partition);
  const auto k0 = static_cast<std::size_t>(report.aggregates.clusters);
  const std::size_t d = pihat.cols();
  report.cluster_means = RealMatrix(k0, d, 0.0);
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const auto c = static_cast<std::size_t>(partition[i]);
    for (std::size_t a = 0; a < d; ++a) {
      report.cluster_means(c, a) +=
          pihat(i, a) / report.aggregates.sizes[c];
    }
  }
  report.conditions = check_conditions(weights, partition);
  try {
    const LambdaBounds b = lambda_bounds(pihat, weights, partition);
    report.lambda_min = b.lambda_min;
    report.lambda_max = b.lambda_max;
  } catch (const UndefinedBound&) {
    report.lambda_min.reset();
    // lambda_max does not depend on A2; recompute it without the min part.
    double lmax = kInfinity;
    for (int a = 0; a < report.aggregates.clusters; ++a) {
      for (int b = a + 1; b < report.aggregates.clusters; ++b) {
        const double denom = cross_scale(report.aggregates, a, b);
        if (!(denom > 0.0)) continue;
        lmax = std::min(lmax, distance(report.cluster_means.row(a),
                                       report.cluster_means.row(b),
                                       Distance::l2) /
                                  denom);
      }
    }
    report.lambda_max = lmax;
  }
  if (group_probs != nullptr && k0 >= 2) {
    report.separation = separation_stats(*group_probs, weights, partition);
    if (scheme != nullptr && scheme->kind == WeightKind::knn_kernel &&
        scheme->kernel == Kernel::gaussian && scheme->distance == Distance::l2 &&
        report.separation->delta > 0.0) {
      try {
        report.kernel = kernel_knn_bounds(scheme->phi, scheme->k,
                                          report.aggregates.sizes,
                                          report.separation->delta);
      } catch (const PreconditionViolated&) {
        report.kernel.reset();
      }
    }
  }
  return report;
}

}  // namespace smm
