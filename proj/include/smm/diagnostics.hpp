#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "smm/matrix.hpp"
#include "smm/weights.hpp"

namespace smm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Weight aggregates of a (weights, reference partition) pair. Partition
/// labels are over graph nodes, ids in [0, k0).
struct WeightAggregates {
  int clusters = 0;
  std::vector<int> sizes;        // p_alpha
  RealMatrix node_to_cluster;    // w_i^(beta), p' x k0
  RealMatrix cluster_to_cluster; // w^(alpha,beta), k0 x k0, zero diagonal
};

WeightAggregates weight_aggregates(const WeightGraph& weights,
                                   std::span<const int> partition);

/// mu_{i,j}^(alpha) = sum_{beta != alpha} |w_i^(beta) - w_j^(beta)|.
double cross_weight_imbalance(const WeightAggregates& agg, int i, int j,
                              int alpha);

struct ConditionCheck {
  bool a1 = true;  // every within-cluster pair has positive weight
  bool a2 = true;  // p_alpha w_ij > mu_ij^(alpha) for every within-cluster pair
  int a1_violations = 0;
  int a2_violations = 0;
  /// Smallest p_alpha w_ij - mu_ij over within-cluster pairs (delta_1).
  double min_margin = kInfinity;
};

ConditionCheck check_conditions(const WeightGraph& weights,
                                std::span<const int> partition);

struct LambdaBounds {
  double lambda_min = 0.0;
  double lambda_max = kInfinity;  // +inf when the cross-cluster weights vanish
};

/// Throws UndefinedBound when some within-cluster margin is <= 0. lambda_max
/// is +inf for a single cluster.
LambdaBounds lambda_bounds(const RealMatrix& pihat, const WeightGraph& weights,
                           std::span<const int> partition);

struct SeparationStats {
  double delta = 0.0;   // min pairwise ||R_alpha - R_beta||_2
  double delta1 = 0.0;  // min within-cluster margin
  double delta2 = 0.0;  // max scaled cross-cluster weight
};

/// groupR is k0 x d. Throws SingleCluster when k0 < 2.
SeparationStats separation_stats(const RealMatrix& group_probs,
                                 const WeightGraph& weights,
                                 std::span<const int> partition);

struct KernelBounds {
  double epsilon_max = 0.0;  // +inf when (k+1) = p_min
  double delta1_min = 0.0;
  double delta2_max = 0.0;
  bool balanced_optimal_k = false;
};

/// Bounds for Gaussian-kernel kNN weights. delta1_min and delta2_max are
/// evaluated at epsilon_max, where delta1_min vanishes by construction; the
/// overload taking epsilon evaluates them at a given deviation instead.
/// Throws PreconditionViolated when k < p_max - 1, phi <= 0 or delta <= 0.
KernelBounds kernel_knn_bounds(double phi, int k, std::span<const int> sizes,
                               double delta);
KernelBounds kernel_knn_bounds(double phi, int k, std::span<const int> sizes,
                               double delta, double epsilon);

struct RecoveryReport {
  WeightAggregates aggregates;
  RealMatrix cluster_means;  // k0 x d
  ConditionCheck conditions;
  std::optional<double> lambda_min;  // empty when A2 fails
  double lambda_max = kInfinity;
  std::optional<SeparationStats> separation;
  std::optional<KernelBounds> kernel;

  bool bounds_ordered() const {
    return lambda_min.has_value() && *lambda_min < lambda_max;
  }
};

/// group_probs (k0 x d, optional) enables delta statistics; phi/k enable the
/// kernel bounds when the weight scheme is Gaussian kNN.
RecoveryReport recovery_report(const RealMatrix& pihat,
                               const WeightGraph& weights,
                               std::span<const int> partition,
                               const RealMatrix* group_probs = nullptr,
                               const WeightScheme* scheme = nullptr);

}  // namespace smm
