#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smm/diagnostics.hpp"
#include "smm/errors.hpp"
#include "smm/simulate.hpp"
#include "support.hpp"

using namespace smm;
using testing_support::rows;

namespace {

WeightGraph uniform_graph(int p) {
  WeightGraph g{p, {}};
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) g.edges.push_back({i, j, 1.0});
  }
  return g;
}

std::vector<int> blocks(std::initializer_list<int> sizes) {
  std::vector<int> out;
  int id = 0;
  for (int s : sizes) {
    for (int i = 0; i < s; ++i) out.push_back(id);
    ++id;
  }
  return out;
}

std::vector<std::vector<double>> dense_rows(const WeightGraph& g) {
  return oracle::to_rows(g.dense());
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("uniform weights satisfy both conditions with zero imbalance") {
  const auto part = blocks({3, 5, 4});
  const auto g = uniform_graph(12);
  const auto check = check_conditions(g, part);
  CHECK(check.a1);
  CHECK(check.a2);
  const auto agg = weight_aggregates(g, part);
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) {
      if (part[static_cast<std::size_t>(i)] == part[static_cast<std::size_t>(j)]) {
        CHECK(cross_weight_imbalance(agg, i, j, part[static_cast<std::size_t>(i)]) == 0.0);
      }
    }
  }
  CHECK(agg.cluster_to_cluster(0, 1) == 15.0);
  CHECK(agg.node_to_cluster(0, 2) == 4.0);
}

TEST_CASE("a missing within-cluster edge breaks A1") {
  WeightGraph g{3, {{0, 2, 1.0}, {1, 2, 1.0}}};
  const std::vector<int> part{0, 0, 1};
  CHECK_FALSE(check_conditions(g, part).a1);
}

TEST_CASE("unequal cross weights break A2") {
  // Clusters {0, 1} and {2, 3}; node 0 has cross weight 1, node 1 has none.
  WeightGraph g{4, {{0, 1, 0.2}, {0, 2, 1.0}, {2, 3, 1.0}}};
  const std::vector<int> part{0, 0, 1, 1};
  const auto agg = weight_aggregates(g, part);
  CHECK(cross_weight_imbalance(agg, 0, 1, 0) == 1.0);
  const auto check = check_conditions(g, part);
  CHECK(check.a1);
  CHECK_FALSE(check.a2);
  const auto pihat = rows({{0.5, 0.5}, {0.4, 0.6}, {0.9, 0.1}, {0.8, 0.2}});
  CHECK_THROWS_AS(lambda_bounds(pihat, g, part), UndefinedBound);
  const auto report = recovery_report(pihat, g, part);
  CHECK_FALSE(report.lambda_min.has_value());
  CHECK_FALSE(report.bounds_ordered());
}

TEST_CASE("lambda bounds special cases") {
  const auto part = blocks({2, 2});
  const auto pihat = rows({{0.5, 0.5}, {0.5, 0.5}, {0.1, 0.9}, {0.1, 0.9}});
  const auto b = lambda_bounds(pihat, uniform_graph(4), part);
  CHECK(b.lambda_min == 0.0);
  CHECK(b.lambda_max > 0.0);

  const std::vector<int> one{0, 0, 0, 0};
  CHECK(std::isinf(lambda_bounds(pihat, uniform_graph(4), one).lambda_max));
}

TEST_CASE("lambda bounds agree with a direct evaluation") {
  // Dominant-symbol group vectors, four groups of four, perturbed slightly.
  Rng rng(61);
  const auto part = blocks({4, 4, 4, 4});
  std::vector<std::vector<double>> pi;
  for (int c : part) {
    std::vector<double> r(4, 0.1);
    r[static_cast<std::size_t>(c)] = 0.7;
    for (double& v : r) v += 0.01 * rng.uniform();
    double s = 0.0;
    for (double v : r) s += v;
    for (double& v : r) v /= s;
    pi.push_back(r);
  }
  for (const auto& g : {uniform_graph(16),
                        compute_weights(rows(pi), WeightScheme::knn(5, Distance::l2, Kernel::gaussian, 20))}) {
    const auto expected = oracle::recovery_quantities(pi, dense_rows(g), part, 4);
    REQUIRE(expected.lambda_min_defined);
    const auto b = lambda_bounds(rows(pi), g, part);
    CHECK(b.lambda_min == doctest::Approx(expected.lambda_min).epsilon(1e-12));
    CHECK(b.lambda_max == doctest::Approx(expected.lambda_max).epsilon(1e-12));
  }
}

TEST_CASE("random instances agree with the direct evaluation") {
  Rng rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 4 + static_cast<int>(rng.uniform_int(10));
    std::vector<int> part(static_cast<std::size_t>(p));
    for (auto& c : part) c = static_cast<int>(rng.uniform_int(3));
    const auto canon = PartitionLabels::canonical(part);
    std::vector<std::vector<double>> pi;
    for (int i = 0; i < p; ++i) pi.push_back(oracle::random_simplex_row(rng, 3));
    WeightGraph g{p, {}};
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        if (rng.uniform() < 0.7) g.edges.push_back({i, j, 0.1 + rng.uniform()});
      }
    }
    const auto expected = oracle::recovery_quantities(pi, dense_rows(g), canon.label, canon.k);
    if (expected.lambda_min_defined) {
      const auto b = lambda_bounds(rows(pi), g, canon.label);
      CHECK(b.lambda_min == doctest::Approx(expected.lambda_min).epsilon(1e-12));
      if (std::isinf(expected.lambda_max)) CHECK(std::isinf(b.lambda_max));
      else CHECK(b.lambda_max == doctest::Approx(expected.lambda_max).epsilon(1e-12));
    } else {
      CHECK_THROWS_AS(lambda_bounds(rows(pi), g, canon.label), UndefinedBound);
    }
  }
}

TEST_CASE("separation statistics") {
  const auto truth = build_setup2();
  const auto part = blocks({4, 4, 4, 4});
  const auto g = uniform_graph(16);
  const auto s = separation_stats(truth.group_probs, g, part);
  CHECK(s.delta == doctest::Approx(std::sqrt(0.72)).epsilon(1e-12));
  CHECK(s.delta1 == 4.0);
  CHECK(s.delta2 == 2.0 * (16 - 4));

  const auto same = rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(separation_stats(same, uniform_graph(4), blocks({2, 2})).delta == 0.0);
  const auto single = rows({{0.5, 0.5}});
  CHECK_THROWS_AS(separation_stats(single, uniform_graph(2), blocks({2})), SingleCluster);
}

TEST_CASE("kernel kNN bounds") {
  const std::vector<int> balanced{4, 4, 4, 4};
  const auto b = kernel_knn_bounds(100.0, 3, balanced, 0.5);
  CHECK(b.balanced_optimal_k);
  CHECK(b.delta2_max == 0.0);
  CHECK(std::isinf(b.epsilon_max));

  const std::vector<int> setup2{18, 18, 15, 13};
  const double delta = 0.8485;
  const auto t = kernel_knn_bounds(100.0, 17, setup2, delta);
  const double expected = delta / 2.0 - std::log(2.0 * (18.0 / 13.0 - 1.0)) / (2.0 * 100.0 * delta);
  CHECK(t.epsilon_max == doctest::Approx(expected).epsilon(1e-14));
  CHECK(t.epsilon_max == doctest::Approx(0.4258).epsilon(1e-4));
  CHECK_FALSE(t.balanced_optimal_k);
  // At epsilon_max the two kernel terms balance exactly.
  CHECK(std::fabs(t.delta1_min) <= 1e-12 * t.delta2_max);

  const auto at = kernel_knn_bounds(100.0, 17, setup2, delta, 0.2);
  CHECK(at.delta1_min == doctest::Approx(13.0 * std::exp(-4.0) - 10.0 * std::exp(-100.0 * std::pow(delta - 0.2, 2))));
  CHECK(at.delta2_max == doctest::Approx(10.0 * std::exp(-100.0 * std::pow(delta - 0.2, 2))));

  CHECK_THROWS_AS(kernel_knn_bounds(100.0, 16, setup2, delta), PreconditionViolated);
  CHECK_THROWS_AS(kernel_knn_bounds(0.0, 17, setup2, delta), PreconditionViolated);
}

TEST_CASE("lambda_min shrinks as within-cluster spread shrinks") {
  Rng rng(63);
  const auto part = blocks({3, 3});
  std::vector<std::vector<double>> centre{{0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}};
  std::vector<std::vector<double>> noise;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> z(3);
    for (double& v : z) v = rng.normal();
    const double mean = (z[0] + z[1] + z[2]) / 3.0;
    for (double& v : z) v -= mean;
    noise.push_back(z);
  }
  const auto g = uniform_graph(6);
  double previous = INFINITY;
  for (double scale : {0.05, 0.02, 0.01, 0.001, 0.0}) {
    std::vector<std::vector<double>> pi;
    for (int i = 0; i < 6; ++i) {
      std::vector<double> r = centre[static_cast<std::size_t>(part[static_cast<std::size_t>(i)])];
      for (std::size_t a = 0; a < 3; ++a) r[a] += scale * noise[static_cast<std::size_t>(i)][a];
      pi.push_back(r);
    }
    const double lm = lambda_bounds(rows(pi), g, part).lambda_min;
    CHECK(lm <= previous);
    previous = lm;
  }
  CHECK(previous == 0.0);
}

TEST_CASE("bounds in terms of kernel constants hold when their assumptions do") {
  const auto truth = build_setup2();
  const std::vector<int> sizes = truth.group_sizes();
  const double phi = 100.0;
  const int k = 17;
  const double delta = separation_stats(truth.group_probs, uniform_graph(64), truth.labels).delta;
  int verified = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Rng rng(seed);
    const auto seq = generate_sequence(truth, 400000, rng);
    const auto e = empirical_transitions(count_transitions(seq, 3, 4));
    REQUIRE(e.observed_contexts().size() == 64);
    double worst = 0.0;
    for (std::size_t j = 0; j < 64; ++j) {
      worst = std::max(worst, distance(e.pihat.row(j), truth.probs_of_context(j), Distance::l2));
    }
    const double eps = 2.0 * worst * (1.0 + 1e-9);
    const auto g = compute_weights(e, WeightScheme::knn(k, Distance::l2, Kernel::gaussian, phi));
    const auto bounds = kernel_knn_bounds(phi, k, sizes, delta, eps);
    if (!(eps < bounds.epsilon_max) || !(bounds.delta1_min > 0.0)) continue;
    ++verified;
    const auto lb = lambda_bounds(e.pihat, g, truth.labels);
    CHECK(lb.lambda_min <= eps / bounds.delta1_min);
    CHECK(lb.lambda_max >= (delta - eps) / bounds.delta2_max);
    const auto s = separation_stats(truth.group_probs, g, truth.labels);
    CHECK(s.delta1 >= bounds.delta1_min);
    CHECK(s.delta2 <= bounds.delta2_max);
  }
  CHECK(verified >= 3);
}

}
