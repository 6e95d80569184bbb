#include "smm/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "smm/errors.hpp"
#include "smm/metrics.hpp"
#include "smm/diagnostics.hpp"
#include "smm/parallel.hpp"

namespace smm {

std::vector<int> GroundTruthSMM::group_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(clusters()), 0);
  for (int g : labels) ++sizes.at(static_cast<std::size_t>(g));
  return sizes;
}

GroundTruthSMM make_block_model(int order, int alphabet_size,
                                std::span<const int> sizes,
                                const RealMatrix& group_probs) {
  const std::size_t p = context_count(order, alphabet_size);
  if (sizes.size() != group_probs.rows() ||
      group_probs.cols() != static_cast<std::size_t>(alphabet_size)) {
    throw InvalidArgument("group vectors do not match the block sizes");
  }
  GroundTruthSMM model;
  model.order = order;
  model.alphabet_size = alphabet_size;
  model.group_probs = group_probs;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    for (int i = 0; i < sizes[g]; ++i) model.labels.push_back(static_cast<int>(g));
  }
  if (model.labels.size() != p) {
    throw InvalidArgument("block sizes must sum to d^m");
  }
  return model;
}

GroundTruthSMM build_setup1(int order, Rng& rng) {
  if (order != 2 && order != 3) {
    throw InvalidArgument("setup 1 is defined for m = 2 or m = 3");
  }
  constexpr int d = 4;
  const int groups = order == 2 ? 4 : 8;
  const int size = static_cast<int>(context_count(order, d)) / groups;
  RealMatrix probs(static_cast<std::size_t>(groups), d);
  for (int g = 0; g < groups; ++g) {
    std::vector<double> alpha(d);
    for (double& a : alpha) a = std::exp(rng.uniform());
    const auto v = rng.dirichlet(alpha);
    std::copy(v.begin(), v.end(), probs.row(static_cast<std::size_t>(g)).begin());
  }
  const std::vector<int> sizes(static_cast<std::size_t>(groups), size);
  return make_block_model(order, d, sizes, probs);
}

GroundTruthSMM build_setup2() {
  constexpr int d = 4;
  RealMatrix probs(4, d, 0.1);
  for (std::size_t g = 0; g < 4; ++g) probs(g, g) = 0.7;
  const std::vector<int> sizes = {18, 18, 15, 13};
  return make_block_model(3, d, sizes, probs);
}

EncodedSequence generate_sequence(const GroundTruthSMM& model, std::size_t n,
                                  Rng& rng, std::size_t burn_in) {
  const auto m = static_cast<std::size_t>(model.order);
  const auto d = static_cast<std::size_t>(model.alphabet_size);
  if (n < m + 1) throw SequenceTooShort("n must be at least m + 1");
  const std::size_t p = model.labels.size();
  const std::size_t high = p / d;
  std::size_t ctx = 0;
  for (std::size_t i = 0; i < m; ++i) ctx = ctx * d + rng.uniform_int(d);
  for (std::size_t t = 0; t < burn_in; ++t) {
    const auto next = static_cast<std::size_t>(rng.categorical(model.probs_of_context(ctx)));
    ctx = (ctx % high) * d + next;
  }
  EncodedSequence seq;
  seq.codes.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const int next = rng.categorical(model.probs_of_context(ctx));
    seq.codes.push_back(next);
    ctx = (ctx % high) * d + static_cast<std::size_t>(next);
  }
  return seq;
}

std::vector<SchemeSummary> summarize(const std::vector<ReplicateRecord>& records) {
  std::vector<SchemeSummary> out;
  std::vector<std::vector<const ReplicateRecord*>> members;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SchemeSummary& s) {
      return s.n == r.n && s.scheme == r.scheme;
    });
    if (it == out.end()) {
      out.push_back({r.n, r.scheme});
      members.emplace_back();
      it = out.end() - 1;
    }
    members[static_cast<std::size_t>(it - out.begin())].push_back(&r);
  }
  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    const auto n = static_cast<double>(v.size());
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    if (v.size() < 2) {
      se = 0.0;
      return;
    }
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<double> ri, ari;
    int recovered = 0;
    for (const auto* r : members[i]) {
      ri.push_back(r->ri);
      ari.push_back(r->ari);
      recovered += r->recovered ? 1 : 0;
      out[i].nonconverged_paths += r->nonconverged > 0 ? 1 : 0;
    }
    out[i].replicates = static_cast<int>(members[i].size());
    mean_se(ri, out[i].mean_ri, out[i].se_ri);
    mean_se(ari, out[i].mean_ari, out[i].se_ari);
    out[i].recovery = static_cast<double>(recovered) / out[i].replicates;
  }
  return out;
}

namespace {

std::vector<ReplicateRecord> run_replicate(const ExperimentConfig& config,
                                           int replicate) {
  Rng rng(replicate_seed(config.seed, static_cast<std::uint64_t>(replicate)));
  GroundTruthSMM truth;
  switch (config.setup) {
    case Setup::setup1: truth = build_setup1(config.order, rng); break;
    case Setup::setup2: truth = build_setup2(); break;
    case Setup::custom:
      if (!config.custom) throw InvalidArgument("custom setup needs a model");
      truth = *config.custom;
      break;
  }
  truth.seed = replicate_seed(config.seed, static_cast<std::uint64_t>(replicate));

  std::vector<ReplicateRecord> out;
  for (long long n : config.lengths) {
    const EncodedSequence seq =
        generate_sequence(truth, static_cast<std::size_t>(n), rng);
    const ContextCounts counts =
        count_transitions(seq, truth.order, truth.alphabet_size);
    const EmpiricalTransitions emp = empirical_transitions(counts);
    const RealMatrix pihat = emp.observed_rows();
    const std::vector<int> observed = emp.observed_contexts();
    std::vector<int> truth_observed;
    for (int j : observed) truth_observed.push_back(truth.labels[static_cast<std::size_t>(j)]);
    const PartitionLabels truth_nodes = PartitionLabels::canonical(truth_observed);

    for (const auto& scheme : config.schemes) {
      ReplicateRecord rec;
      rec.replicate = replicate;
      rec.n = n;
      rec.scheme = scheme.name();
      rec.observed = static_cast<int>(observed.size());
      const WeightGraph weights = compute_weights(pihat, scheme);
      const auto grid = lambda_grid(pihat, weights, config.grid_size, config.solver);
      const PathResult path = fit_path(counts, weights, grid, config.solver);
      const auto& best = path.best();
      rec.ri = rand_index(truth_nodes.label, best.partition.label);
      rec.ari = adjusted_rand_index(truth_nodes.label, best.partition.label);
      rec.k_hat = best.k;
      rec.lambda = best.lambda;
      rec.recovered = same_partition(truth_nodes.label, best.partition.label);
      rec.nonconverged = path.nonconverged;
      rec.nesting_violations = path.nesting_violations;
      if (config.diagnostics) {
        const RecoveryReport report =
            recovery_report(pihat, weights, truth_nodes.label);
        rec.lambda_min = report.lambda_min.value_or(std::nan(""));
        rec.lambda_max = report.lambda_max;
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace

ExperimentSummary run_recovery_experiment(const ExperimentConfig& config) {
  if (config.replicates < 1) throw InvalidArgument("replicates must be >= 1");
  if (config.schemes.empty()) throw InvalidArgument("no weight schemes");
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<ReplicateRecord>> per(static_cast<std::size_t>(config.replicates));
  parallel_for(per.size(), resolve_threads(config.threads), [&](std::size_t r) {
    per[r] = run_replicate(config, static_cast<int>(r));
  });
  ExperimentSummary summary;
  for (auto& recs : per) {
    for (auto& r : recs) summary.records.push_back(std::move(r));
  }
  summary.summaries = summarize(summary.records);
  summary.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return summary;
}

}  // namespace smm
