#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smm/markov_core.hpp"
#include "smm/random.hpp"
#include "smm/selection.hpp"
#include "smm/solver.hpp"
#include "smm/weights.hpp"

namespace smm {

/// Known sparse Markov model: a partition of all p contexts plus one
/// transition vector per group.
struct GroundTruthSMM {
  int order = 0;
  int alphabet_size = 0;
  std::vector<int> labels;  // size p, ids in [0, k0)
  RealMatrix group_probs;   // k0 x d
  std::uint64_t seed = 0;

  int clusters() const { return static_cast<int>(group_probs.rows()); }
  std::vector<int> group_sizes() const;
  std::span<const double> probs_of_context(std::size_t context) const {
    return group_probs.row(static_cast<std::size_t>(labels.at(context)));
  }
};

/// d = 4 and m in {2, 3}: 4 contiguous blocks of 4 contexts (m = 2) or 8 of 8
/// (m = 3). Each group vector is Dirichlet(exp(Z_1), ..., exp(Z_4)) with
/// Z_l ~ Unif(0, 1).
GroundTruthSMM build_setup1(int order, Rng& rng);

/// d = 4, m = 3; groups of 18, 18, 15 and 13 contiguous contexts; group alpha
/// puts 0.7 on symbol alpha and 0.1 on each other symbol.
GroundTruthSMM build_setup2();

/// Contiguous equal blocks: group sizes and per-group vectors given.
GroundTruthSMM make_block_model(int order, int alphabet_size,
                                std::span<const int> sizes,
                                const RealMatrix& group_probs);

/// Uniform initial m-tuple, `burn_in` discarded steps, then n emitted symbols.
EncodedSequence generate_sequence(const GroundTruthSMM& model, std::size_t n,
                                  Rng& rng, std::size_t burn_in = 1000);

enum class Setup { setup1, setup2, custom };

struct ExperimentConfig {
  Setup setup = Setup::setup1;
  int order = 2;
  std::vector<long long> lengths = {10000};
  int replicates = 50;
  std::vector<WeightScheme> schemes = {
      WeightScheme::knn(3, Distance::l2, Kernel::gaussian, 100.0)};
  SolverConfig solver;
  int grid_size = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  /// Adds lambda_min / lambda_max against the truth to every record.
  bool diagnostics = false;
  /// Required when setup == custom.
  std::optional<GroundTruthSMM> custom;
};

struct ReplicateRecord {
  int replicate = 0;
  long long n = 0;
  std::string scheme;
  double ri = 0.0;
  double ari = 0.0;
  int k_hat = 0;
  double lambda = 0.0;
  bool recovered = false;
  int nonconverged = 0;
  int nesting_violations = 0;
  int observed = 0;
  /// Present only with diagnostics; lambda_min is NaN when A2 fails.
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct SchemeSummary {
  long long n = 0;
  std::string scheme;
  int replicates = 0;
  double mean_ri = 0.0;
  double se_ri = 0.0;
  double mean_ari = 0.0;
  double se_ari = 0.0;
  double recovery = 0.0;
  int nonconverged_paths = 0;
};

struct ExperimentSummary {
  std::vector<ReplicateRecord> records;  // sorted by (replicate, n, scheme)
  std::vector<SchemeSummary> summaries;  // one per (n, scheme)
  double seconds = 0.0;                  // wall time, never serialized
};

/// Per replicate: build truth, generate, count, weigh, fit the path, select,
/// compare to the truth on the observed contexts.
ExperimentSummary run_recovery_experiment(const ExperimentConfig& config);

/// Aggregates records by (n, scheme) in first-seen order.
std::vector<SchemeSummary> summarize(const std::vector<ReplicateRecord>& records);

}  // namespace smm
