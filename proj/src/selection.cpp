#include "smm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "smm/errors.hpp"

namespace smm {

GroupEstimates group_mle(const ContextCounts& counts,
                         std::span<const int> labels, int k) {
  const std::size_t p = counts.context_space();
  const auto d = static_cast<std::size_t>(counts.alphabet_size);
  if (labels.size() != p) {
    throw InvalidArgument("partition must label every context");
  }
  if (k < 0) throw InvalidArgument("negative group count");
  GroupEstimates out;
  const auto kk = static_cast<std::size_t>(k);
  out.counts = CountMatrix(kk, d, 0);
  out.totals.assign(kk, 0);
  out.probs = RealMatrix(kk, d, 1.0 / static_cast<double>(d));
  out.empty.assign(kk, false);
  std::vector<int> members(kk, 0);
  for (std::size_t j = 0; j < p; ++j) {
    const int g = labels[j];
    if (g == kUnseenGroup) continue;
    if (g < 0 || g >= k) throw InvalidArgument("group label out of range");
    ++members[static_cast<std::size_t>(g)];
    out.totals[static_cast<std::size_t>(g)] += counts.context_total[j];
    for (std::size_t a = 0; a < d; ++a) {
      out.counts(static_cast<std::size_t>(g), a) += counts.transition(j, a);
    }
  }
  for (std::size_t g = 0; g < kk; ++g) {
    if (members[g] == 0) {
      throw EmptyGroup("group " + std::to_string(g) + " has no contexts");
    }
    if (out.totals[g] == 0) {
      out.empty[g] = true;
      continue;
    }
    for (std::size_t a = 0; a < d; ++a) {
      out.probs(g, a) = static_cast<double>(out.counts(g, a)) /
                        static_cast<double>(out.totals[g]);
    }
  }
  return out;
}

double log_likelihood(const ContextCounts& counts, std::span<const int> labels,
                      int k) {
  const GroupEstimates est = group_mle(counts, labels, k);
  double ll = 0.0;
  for (std::size_t g = 0; g < est.counts.rows(); ++g) {
    for (std::size_t a = 0; a < est.counts.cols(); ++a) {
      const long long n = est.counts(g, a);
      if (n == 0) continue;
      ll += static_cast<double>(n) * std::log(est.probs(g, a));
    }
  }
  return ll;
}

double bic_score(double loglik, int k, long long n, int alphabet_size) {
  return -2.0 * loglik + static_cast<double>(k) *
                             static_cast<double>(alphabet_size - 1) *
                             std::log(static_cast<double>(n));
}

double bic_score(const ContextCounts& counts, std::span<const int> labels,
                 int k) {
  return bic_score(log_likelihood(counts, labels, k), k,
                   counts.sequence_length, counts.alphabet_size);
}

std::vector<int> expand_labels(const PartitionLabels& partition,
                               std::span<const int> observed_contexts,
                               std::size_t context_space) {
  if (partition.label.size() != observed_contexts.size()) {
    throw InvalidArgument("partition size differs from observed contexts");
  }
  std::vector<int> labels(context_space, kUnseenGroup);
  for (std::size_t i = 0; i < observed_contexts.size(); ++i) {
    labels.at(static_cast<std::size_t>(observed_contexts[i])) =
        partition.label[i];
  }
  return labels;
}

bool is_refinement(std::span<const int> fine, std::span<const int> coarse) {
  if (fine.size() != coarse.size()) return false;
  std::map<int, int> image;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    auto [it, inserted] = image.emplace(fine[i], coarse[i]);
    if (!inserted && it->second != coarse[i]) return false;
  }
  return true;
}

namespace {

int fused_cluster_count(const RealMatrix& pihat, const WeightGraph& weights,
                        double lambda, const SolverConfig& config) {
  const SolverResult r = ama_solve(pihat, weights, lambda, config);
  return extract_clusters(r.centroids, pihat, config.fusion_tol).k;
}

}  // namespace

std::vector<double> lambda_grid(const RealMatrix& pihat,
                                const WeightGraph& weights, int grid_size,
                                const SolverConfig& config) {
  if (grid_size < 2) throw InvalidArgument("grid size must be at least 2");
  double dist_sum = 0.0, weight_sum = 0.0;
  for (const auto& e : weights.edges) {
    dist_sum += distance(pihat.row(static_cast<std::size_t>(e.first)),
                         pihat.row(static_cast<std::size_t>(e.second)),
                         Distance::l2);
    weight_sum += e.weight;
  }

  double top = 1e-6;  // fallback when every edge joins identical rows
  if (dist_sum > 0.0 && weight_sum > 0.0) {
    const int target = weights.component_count();
    constexpr int kMaxProbes = 40;
    double lambda = dist_sum / (2.0 * weight_sum);
    if (fused_cluster_count(pihat, weights, lambda, config) <= target) {
      top = lambda;
      for (int i = 0; i < kMaxProbes; ++i) {
        const double lower = top / 2.0;
        if (fused_cluster_count(pihat, weights, lower, config) > target) break;
        top = lower;
      }
    } else {
      for (int i = 0; i < kMaxProbes; ++i) {
        lambda *= 2.0;
        if (fused_cluster_count(pihat, weights, lambda, config) <= target) break;
      }
      top = lambda;
    }
  }

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(grid_size));
  grid.push_back(0.0);
  const int interior = grid_size - 1;
  const double bottom = top / 1e4;
  for (int i = 0; i < interior; ++i) {
    if (interior == 1) {
      grid.push_back(top);
      break;
    }
    const double frac = static_cast<double>(i) / (interior - 1);
    grid.push_back(bottom * std::pow(top / bottom, frac));
  }
  grid.back() = top;
  return grid;
}

std::size_t select_solution(std::span<const LambdaSolution> solutions) {
  if (solutions.empty()) throw InvalidArgument("empty solution path");
  std::size_t best = solutions.size();
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    const auto& s = solutions[i];
    if (s.duplicate_of >= 0) continue;
    if (best == solutions.size()) {
      best = i;
      continue;
    }
    const auto& b = solutions[best];
    if (s.bic < b.bic || (s.bic == b.bic && s.k < b.k) ||
        (s.bic == b.bic && s.k == b.k && s.lambda < b.lambda)) {
      best = i;
    }
  }
  return best;
}

PathResult fit_path(const ContextCounts& counts, const WeightGraph& weights,
                    std::span<const double> grid, const SolverConfig& config,
                    const PathOptions& options) {
  if (grid.empty()) throw InvalidArgument("empty lambda grid");
  const EmpiricalTransitions emp = empirical_transitions(counts);
  const RealMatrix pihat = emp.observed_rows();
  PathResult path;
  path.observed_contexts = emp.observed_contexts();
  if (static_cast<std::size_t>(weights.node_count) != pihat.rows()) {
    throw InvalidArgument("weight graph does not match observed contexts");
  }

  const RealMatrix* warm = nullptr;
  RealMatrix previous_duals;
  for (double lambda : grid) {
    SolverResult r = ama_solve(pihat, weights, lambda, config,
                               options.warm_start ? warm : nullptr);
    if (warm != nullptr && r.raw_row_sum_error > 1e-8) {
      r = ama_solve(pihat, weights, lambda, config);
    }
    LambdaSolution s;
    s.lambda = lambda;
    s.partition = extract_clusters(r.centroids, pihat, config.fusion_tol);
    s.k = s.partition.k;
    const auto labels =
        expand_labels(s.partition, path.observed_contexts, counts.context_space());
    const GroupEstimates est = group_mle(counts, labels, s.k);
    s.group_probs = est.probs;
    s.loglik = log_likelihood(counts, labels, s.k);
    s.bic = bic_score(s.loglik, s.k, counts.sequence_length, counts.alphabet_size);
    s.converged = r.converged;
    s.iterations = r.iterations;
    s.relative_gap = r.relative_gap();
    if (!r.converged) ++path.nonconverged;

    for (std::size_t i = 0; i < path.solutions.size(); ++i) {
      if (path.solutions[i].duplicate_of < 0 &&
          path.solutions[i].partition == s.partition) {
        s.duplicate_of = static_cast<int>(i);
        break;
      }
    }
    if (!path.solutions.empty() &&
        !is_refinement(path.solutions.back().partition.label, s.partition.label)) {
      ++path.nesting_violations;
    }
    path.solutions.push_back(std::move(s));
    previous_duals = std::move(r.duals);
    warm = &previous_duals;
  }
  path.selected = select_solution(path.solutions);
  return path;
}

SMMModel make_model(const ContextCounts& counts, const Alphabet& alphabet,
                    const LambdaSolution& solution,
                    std::span<const int> observed_contexts) {
  SMMModel model;
  model.alphabet = alphabet;
  model.order = counts.order;
  model.labels =
      expand_labels(solution.partition, observed_contexts, counts.context_space());
  const GroupEstimates est = group_mle(counts, model.labels, solution.k);
  model.group_probs = est.probs;
  model.group_counts = est.counts;
  model.lambda = solution.lambda;
  model.bic = solution.bic;
  model.loglik = solution.loglik;
  model.k = solution.k;
  model.n = counts.sequence_length;
  return model;
}

FitResult fit_smm(const ContextCounts& counts, const Alphabet& alphabet,
                  const FitOptions& options) {
  if (static_cast<std::size_t>(counts.alphabet_size) != alphabet.size()) {
    throw InvalidArgument("alphabet size differs from counts");
  }
  FitResult fit;
  fit.pihat = empirical_transitions(counts).observed_rows();
  fit.weights = compute_weights(fit.pihat, options.scheme);
  fit.grid = lambda_grid(fit.pihat, fit.weights, options.grid_size, options.solver);
  fit.path = fit_path(counts, fit.weights, fit.grid, options.solver, options.path);
  fit.model = make_model(counts, alphabet, fit.path.best(),
                         fit.path.observed_contexts);
  fit.model.smoothing = options.smoothing;
  fit.model.seed = options.seed;
  return fit;
}

}  // namespace smm
