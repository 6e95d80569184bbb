#pragma once

#include <optional>
#include <span>
#include <vector>

#include "smm/matrix.hpp"
#include "smm/weights.hpp"

namespace smm {

struct SolverConfig {
  /// Dual step nu; defaults to 1/p'. Must lie in (0, 2/p').
  std::optional<double> step;
  /// Stop when (primal - dual) <= tol * |primal|.
  double dual_gap_tol = 1e-6;
  int max_iter = 20000;
  /// Relative fusion tolerance used by extract_clusters.
  double fusion_tol = 1e-4;
  /// Iterations between duality-gap evaluations.
  int check_every = 10;
  /// Record the dual objective after every iteration (slow; for tests).
  bool record_dual_trace = false;
};

struct SolverResult {
  /// B*, p' x d. Each row of the final AMA iterate projected onto the simplex.
  RealMatrix centroids;
  /// Gamma*, one d-vector per edge (edge order of the WeightGraph).
  RealMatrix duals;
  int iterations = 0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool converged = false;
  /// Largest |row sum - 1| of the unprojected iterate pihat + Delta(Gamma).
  double raw_row_sum_error = 0.0;
  /// Most negative entry of the unprojected iterate (0 when none).
  double raw_min_entry = 0.0;
  /// Dual objective after each iteration when requested.
  std::vector<double> dual_trace;

  double relative_gap() const;
};

struct PartitionLabels {
  std::vector<int> label;
  int k = 0;

  /// Relabels clusters in first-seen order.
  static PartitionLabels canonical(std::span<const int> raw);
  friend bool operator==(const PartitionLabels&, const PartitionLabels&) = default;
};

/// 1/2 sum_j ||pihat_j - b_j||^2 + lambda sum_l w_l ||b_l1 - b_l2||_2.
double evaluate_objective(const RealMatrix& pihat, const RealMatrix& centroids,
                          const WeightGraph& weights, double lambda);

/// Euclidean projection onto the ball of radius r, in place.
void project_ball(std::span<double> x, double radius);
std::vector<double> project_ball(std::span<const double> x, double radius);

/// Euclidean projection onto the probability simplex, in place.
void project_simplex(std::span<double> x);

/// Delta_j = sum_{l1 = j} gamma_l - sum_{l2 = j} gamma_l.
RealMatrix dual_aggregate(const RealMatrix& duals, const WeightGraph& weights,
                          std::size_t node_count);

struct DualityGap {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

/// Dual objective -1/2 sum_j ||Delta_j||^2 - sum_l <gamma_l, pihat_l1 - pihat_l2>,
/// valid when every ||gamma_l|| <= lambda w_l.
double dual_objective(const RealMatrix& pihat, const RealMatrix& duals,
                      const WeightGraph& weights);
DualityGap dual_gap(const RealMatrix& pihat, const RealMatrix& centroids,
                    const RealMatrix& duals, const WeightGraph& weights,
                    double lambda);

/// Alternating minimization on the fusion-penalized criterion with the l2
/// group penalty. A warm start (edge x d duals, any scale) is projected onto
/// the dual-feasible set before the first update; otherwise Gamma starts at 0.
/// Non-convergence is reported through SolverResult::converged.
SolverResult ama_solve(const RealMatrix& pihat, const WeightGraph& weights,
                       double lambda, const SolverConfig& config,
                       const RealMatrix* warm_start = nullptr);

/// Sweep over rows in index order: each unassigned row j1 absorbs every
/// unassigned j2 > j1 with ||b_j1 - b_j2||_2 <= tau * (1 + max_j ||pihat_j||_2).
PartitionLabels extract_clusters(const RealMatrix& centroids,
                                 const RealMatrix& pihat, double tau);

}  // namespace smm
