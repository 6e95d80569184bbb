#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smm/markov_core.hpp"
#include "smm/solver.hpp"
#include "smm/weights.hpp"

namespace smm {

/// Label reserved for contexts never observed in the training data.
inline constexpr int kUnseenGroup = -1;

/// Pooled per-group estimates R_{alpha,a} = N_{C_alpha,a} / N_{C_alpha}.
struct GroupEstimates {
  RealMatrix probs;        // k x d; uniform 1/d for empty groups
  CountMatrix counts;      // k x d pooled transition counts
  std::vector<long long> totals;
  std::vector<bool> empty;
};

/// labels has one entry per context (size p) with ids in [0, k) or
/// kUnseenGroup. Throws EmptyGroup if a labelled group has no counts.
GroupEstimates group_mle(const ContextCounts& counts,
                         std::span<const int> labels, int k);

/// sum_alpha sum_a N_{C_alpha,a} log R_{alpha,a}, with 0 log 0 = 0.
double log_likelihood(const ContextCounts& counts, std::span<const int> labels,
                      int k);

/// -2 loglik + k (d - 1) log n.
double bic_score(double loglik, int k, long long n, int alphabet_size);
double bic_score(const ContextCounts& counts, std::span<const int> labels,
                 int k);

/// Expands node labels (one per observed context) to all p contexts, marking
/// unobserved ones kUnseenGroup.
std::vector<int> expand_labels(const PartitionLabels& partition,
                               std::span<const int> observed_contexts,
                               std::size_t context_space);

/// Geometric lambda grid: {0, interior..., lambda_G}. lambda_G is the smallest
/// probed lambda at which the fit reaches its minimal cluster count (one
/// cluster per connected component of the weight graph).
std::vector<double> lambda_grid(const RealMatrix& pihat,
                                const WeightGraph& weights, int grid_size,
                                const SolverConfig& config);

struct LambdaSolution {
  double lambda = 0.0;
  PartitionLabels partition;  // over observed contexts
  int k = 0;
  RealMatrix group_probs;     // k x d
  double loglik = 0.0;
  double bic = 0.0;
  bool converged = true;
  int iterations = 0;
  double relative_gap = 0.0;
  /// Index of an earlier solution with an identical partition, or -1.
  int duplicate_of = -1;
};

struct SMMModel {
  Alphabet alphabet;
  int order = 0;
  /// One entry per context: group id in [0, k) or kUnseenGroup.
  std::vector<int> labels;
  RealMatrix group_probs;    // k x d
  CountMatrix group_counts;  // k x d
  double smoothing = 0.5;
  double lambda = 0.0;
  double bic = 0.0;
  double loglik = 0.0;
  int k = 0;
  long long n = 0;
  std::uint64_t seed = 0;

  int group_of(std::size_t context) const { return labels.at(context); }
  friend bool operator==(const SMMModel&, const SMMModel&) = default;
};

struct PathOptions {
  /// Reuse the previous dual solution as the next starting point.
  bool warm_start = true;
};

struct PathResult {
  std::vector<LambdaSolution> solutions;
  std::size_t selected = 0;
  std::vector<int> observed_contexts;
  int nonconverged = 0;
  /// Consecutive grid points whose partitions are not nested.
  int nesting_violations = 0;

  const LambdaSolution& best() const { return solutions.at(selected); }
};

/// One solve per grid value; selection is the minimum BIC over distinct
/// partitions, ties broken by smaller k, then smaller lambda.
PathResult fit_path(const ContextCounts& counts, const WeightGraph& weights,
                    std::span<const double> grid, const SolverConfig& config,
                    const PathOptions& options = {});

/// Index of the BIC-minimizing solution under the tie rules above.
std::size_t select_solution(std::span<const LambdaSolution> solutions);

/// Builds the fitted model for a solution; group probabilities are the pooled
/// count estimates, not the solver centroids.
SMMModel make_model(const ContextCounts& counts, const Alphabet& alphabet,
                    const LambdaSolution& solution,
                    std::span<const int> observed_contexts);

struct FitOptions {
  WeightScheme scheme;
  SolverConfig solver;
  int grid_size = 100;
  PathOptions path;
  double smoothing = 0.5;
  std::uint64_t seed = 0;
};

struct FitResult {
  SMMModel model;
  PathResult path;
  WeightGraph weights;
  RealMatrix pihat;  // observed rows
  std::vector<double> grid;
};

/// counts -> pihat -> weights -> lambda grid -> path -> BIC selection.
FitResult fit_smm(const ContextCounts& counts, const Alphabet& alphabet,
                  const FitOptions& options);

/// True when every block of `fine` lies inside a single block of `coarse`.
bool is_refinement(std::span<const int> fine, std::span<const int> coarse);

}  // namespace smm
