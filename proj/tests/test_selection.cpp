#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smm/errors.hpp"
#include "smm/metrics.hpp"
#include "smm/selection.hpp"
#include "smm/simulate.hpp"
#include "support.hpp"

using namespace smm;
using testing_support::count_string;
using testing_support::rows;

namespace {

// l(partition) written out from pooled counts, independent of group_mle.
double direct_loglik(const ContextCounts& c, const std::vector<int>& labels, int k) {
  double total = 0.0;
  for (int g = 0; g < k; ++g) {
    std::vector<double> pooled(static_cast<std::size_t>(c.alphabet_size), 0.0);
    double n = 0.0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != g) continue;
      for (std::size_t a = 0; a < pooled.size(); ++a) {
        pooled[a] += static_cast<double>(c.transition(j, a));
        n += static_cast<double>(c.transition(j, a));
      }
    }
    for (double x : pooled) {
      if (x > 0) total += x * std::log(x / n);
    }
  }
  return total;
}

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("pooled group estimates") {
  const auto c = count_string("AABAB", "AB", 1);
  const std::vector<int> merged{0, 0};
  const auto g = group_mle(c, merged, 1);
  CHECK(g.probs(0, 0) == 0.5);
  CHECK(g.probs(0, 1) == 0.5);

  const std::vector<int> single{0, 1};
  const auto s = group_mle(c, single, 2);
  const auto e = empirical_transitions(c);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t a = 0; a < 2; ++a) CHECK(s.probs(j, a) == e.pihat(j, a));
  }

  // Two contexts with opposite deterministic successors pool to (0.5, 0.5).
  ContextCounts crafted;
  crafted.order = 1;
  crafted.alphabet_size = 2;
  crafted.context_total = {2, 2};
  crafted.transition = CountMatrix(2, 2);
  crafted.transition(0, 0) = 2;
  crafted.transition(1, 1) = 2;
  const auto p = group_mle(crafted, merged, 1);
  CHECK(p.probs(0, 0) == 0.5);
  CHECK(p.probs(0, 1) == 0.5);

  const std::vector<int> gap{0, 2};
  CHECK_THROWS_AS(group_mle(c, gap, 3), EmptyGroup);
}

TEST_CASE("log-likelihood and BIC for AABAB") {
  const auto c = count_string("AABAB", "AB", 1);
  const std::vector<int> single{0, 1};
  const std::vector<int> merged{0, 0};
  const double ls = log_likelihood(c, single, 2);
  const double expected_single = std::log(1.0 / 3.0) + 2.0 * std::log(2.0 / 3.0);
  CHECK(ls == doctest::Approx(expected_single).epsilon(1e-14));
  CHECK(ls == doctest::Approx(-1.9095).epsilon(1e-4));
  const double lm = log_likelihood(c, merged, 1);
  CHECK(lm == doctest::Approx(4.0 * std::log(0.5)).epsilon(1e-14));

  const double bs = bic_score(c, single, 2);
  const double bm = bic_score(c, merged, 1);
  CHECK(bs == doctest::Approx(-2.0 * expected_single + 2.0 * std::log(5.0)).epsilon(1e-14));
  CHECK(bs == doctest::Approx(7.0378).epsilon(1e-4));
  CHECK(bm == doctest::Approx(-8.0 * std::log(0.5) + std::log(5.0)).epsilon(1e-14));
  CHECK(bm == doctest::Approx(7.1547).epsilon(1e-4));
  CHECK(bic_score(-3.0, 1, 1, 5) == doctest::Approx(6.0));  // log 1 = 0
}

TEST_CASE("deterministic chains have zero log-likelihood") {
  const auto c = count_string("ABABABABAB", "AB", 1);
  const std::vector<int> single{0, 1};
  CHECK(log_likelihood(c, single, 2) == 0.0);
}

TEST_CASE("coarsening never increases the log-likelihood") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_int(3));
    const auto seq = testing_support::random_codes(rng, 50 + rng.uniform_int(300), d);
    const auto c = count_transitions(EncodedSequence{seq}, 2, d);
    const std::size_t p = c.context_space();
    std::vector<int> fine(p);
    for (auto& f : fine) f = static_cast<int>(rng.uniform_int(6));
    const auto fine_c = PartitionLabels::canonical(fine);
    std::vector<int> map(static_cast<std::size_t>(fine_c.k));
    for (auto& m : map) m = static_cast<int>(rng.uniform_int(3));
    std::vector<int> coarse(p);
    for (std::size_t j = 0; j < p; ++j) coarse[j] = map[static_cast<std::size_t>(fine_c.label[j])];
    const auto coarse_c = PartitionLabels::canonical(coarse);
    const double lf = log_likelihood(c, fine_c.label, fine_c.k);
    const double lc = log_likelihood(c, coarse_c.label, coarse_c.k);
    CHECK(lf >= lc - 1e-9);
    CHECK(lf == doctest::Approx(direct_loglik(c, fine_c.label, fine_c.k)).epsilon(1e-12));
    CHECK(is_refinement(fine_c.label, coarse_c.label));
    const double b = bic_score(c, fine_c.label, fine_c.k);
    CHECK(b == -2.0 * lf + fine_c.k * (d - 1) * std::log(static_cast<double>(c.sequence_length)));
  }
}

TEST_CASE("lambda grid") {
  const auto pihat = rows({{0.2, 0.8}, {0.2, 0.8}, {0.9, 0.1}});
  WeightGraph g{3, {{0, 1, 1.0}, {0, 2, 0.5}, {1, 2, 0.5}}};
  const auto two = lambda_grid(pihat, g, 2, {});
  REQUIRE(two.size() == 2);
  CHECK(two[0] == 0.0);
  CHECK(two[1] > 0.0);
  CHECK(std::isfinite(two[1]));
  const auto r = ama_solve(pihat, g, two[1], {});
  CHECK(extract_clusters(r.centroids, pihat, 1e-4).k == 1);

  const auto same = rows({{0.4, 0.6}, {0.4, 0.6}});
  WeightGraph e{2, {{0, 1, 1.0}}};
  const auto tiny = lambda_grid(same, e, 5, {});
  CHECK(std::isfinite(tiny.back()));
  CHECK(tiny.back() > 0.0);
  CHECK(tiny.back() < 1e-3);
}

TEST_CASE("grid on a simulated instance spans four decades") {
  Rng rng(41);
  const auto truth = build_setup1(2, rng);
  const auto seq = generate_sequence(truth, 10000, rng);
  const auto counts = count_transitions(seq, 2, 4);
  const auto e = empirical_transitions(counts);
  const auto g = compute_weights(e, WeightScheme::knn(3, Distance::l2, Kernel::gaussian, 100));
  const auto grid = lambda_grid(e.observed_rows(), g, 100, {});
  REQUIRE(grid.size() == 100);
  CHECK(grid[0] == 0.0);
  CHECK(grid.back() / grid[1] >= 1e4 * (1 - 1e-12));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("a grid holding only zero selects the saturated model") {
  const auto counts = count_string("AABABBBABAABBABAAAB", "AB", 2);
  const auto e = empirical_transitions(counts);
  const auto g = compute_weights(e, WeightScheme::uniform());
  const std::vector<double> grid{0.0};
  const auto path = fit_path(counts, g, grid, {});
  REQUIRE(path.solutions.size() == 1);
  const auto& s = path.best();
  CHECK(s.k == static_cast<int>(e.observed_contexts().size()));
  const auto labels = expand_labels(s.partition, path.observed_contexts, counts.context_space());
  CHECK(s.bic == doctest::Approx(bic_score(counts, labels, s.k)));
}

TEST_CASE("selection prefers lower BIC, then fewer clusters, then smaller lambda") {
  std::vector<LambdaSolution> s(4);
  s[0].lambda = 0.0; s[0].k = 5; s[0].bic = 10.0;
  s[1].lambda = 0.1; s[1].k = 3; s[1].bic = 9.0;
  s[2].lambda = 0.2; s[2].k = 2; s[2].bic = 9.0;
  s[3].lambda = 0.3; s[3].k = 2; s[3].bic = 9.0; s[3].duplicate_of = 2;
  CHECK(select_solution(s) == 2);
  s[0].bic = 8.0;
  CHECK(select_solution(s) == 0);
}

TEST_CASE("fitted model stores pooled estimates and marks unseen contexts") {
  const auto counts = count_string("AAAAACAAACCAAAACAACA", "ACG", 1);
  FitOptions opt;
  opt.scheme = WeightScheme::uniform();
  opt.grid_size = 10;
  const auto fit = fit_smm(counts, Alphabet::from_chars("ACG"), opt);
  CHECK(fit.model.labels[2] == kUnseenGroup);
  for (std::size_t g = 0; g < fit.model.group_probs.rows(); ++g) {
    double s = 0.0;
    for (double v : fit.model.group_probs.row(g)) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto direct = group_mle(counts, fit.model.labels, fit.model.k);
  CHECK(direct.probs == fit.model.group_probs);
  CHECK(fit.model.n == 20);
}

TEST_CASE("selected partition is on the path and refitting is bit-identical") {
  Rng rng(51);
  const auto truth = build_setup2();
  const auto seq = generate_sequence(truth, 2000, rng);
  const auto counts = count_transitions(seq, 3, 4);
  FitOptions opt;
  opt.scheme = WeightScheme::knn(15, Distance::linf, Kernel::exponential, 10);
  const auto a = fit_smm(counts, Alphabet::from_chars("ACGT"), opt);
  const auto b = fit_smm(counts, Alphabet::from_chars("ACGT"), opt);
  CHECK(a.model == b.model);
  const auto& best = a.path.best();
  CHECK(best.duplicate_of == -1);
  for (const auto& s : a.path.solutions) CHECK(s.bic >= best.bic);
}

TEST_CASE("recovery at n = 25000 with kNN Gaussian weights") {
  ExperimentConfig cfg;
  cfg.order = 2;
  cfg.lengths = {25000};
  cfg.replicates = 200;
  cfg.seed = 1;
  const auto result = run_recovery_experiment(cfg);
  REQUIRE(result.summaries.size() == 1);
  CHECK(result.summaries[0].recovery >= 0.98);
  CHECK(result.summaries[0].mean_ari >= 0.98);
}

}
