#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "smm/errors.hpp"
#include "smm/solver.hpp"
#include "support.hpp"

using namespace smm;
using testing_support::rows;

namespace {

WeightGraph complete_graph(int p) {
  WeightGraph g{p, {}};
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) g.edges.push_back({i, j, 1.0});
  }
  return g;
}

RealMatrix random_pihat(Rng& rng, std::size_t p, std::size_t d) {
  std::vector<std::vector<double>> r;
  for (std::size_t i = 0; i < p; ++i) r.push_back(oracle::random_simplex_row(rng, d));
  return rows(r);
}

WeightGraph random_graph(Rng& rng, int p, double density) {
  WeightGraph g{p, {}};
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (rng.uniform() < density) g.edges.push_back({i, j, 0.05 + rng.uniform()});
    }
  }
  return g;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("objective examples") {
  const auto pihat = rows({{1, 0}, {0, 1}});
  const auto g = complete_graph(2);
  CHECK(evaluate_objective(pihat, pihat, g, 0.0) == 0.0);
  CHECK(evaluate_objective(pihat, pihat, g, 0.3) == doctest::Approx(0.3 * std::sqrt(2.0)));
  const auto mid = rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(evaluate_objective(pihat, mid, g, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("ball projection") {
  const std::vector<double> x{3, 4};
  CHECK(project_ball(x, 10.0) == std::vector<double>{3, 4});
  const auto y = project_ball(x, 1.0);
  CHECK(y[0] == doctest::Approx(0.6));
  CHECK(y[1] == doctest::Approx(0.8));
  const std::vector<double> z{0, 0};
  CHECK(project_ball(z, 2.0) == std::vector<double>{0, 0});
}

TEST_CASE("simplex projection matches a bisection oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + rng.uniform_int(6));
    for (double& x : v) x = 3.0 * rng.normal();
    std::vector<double> expected = v;
    oracle::project_simplex(expected);
    project_simplex(v);
    for (std::size_t a = 0; a < v.size(); ++a) CHECK(v[a] == doctest::Approx(expected[a]).epsilon(1e-9));
  }
}

TEST_CASE("lambda zero returns pihat exactly after one iteration") {
  Rng rng(9);
  const auto pihat = random_pihat(rng, 6, 4);
  const auto r = ama_solve(pihat, complete_graph(6), 0.0, {});
  CHECK(r.centroids == pihat);
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  CHECK(r.primal == 0.0);
  CHECK(r.dual == 0.0);
}

TEST_CASE("large lambda with uniform weights fuses to the grand mean") {
  Rng rng(10);
  const auto pihat = random_pihat(rng, 5, 3);
  SolverConfig cfg;
  cfg.max_iter = 200000;
  const auto r = ama_solve(pihat, complete_graph(5), 10.0, cfg);
  CHECK(r.converged);
  std::vector<double> mean(3, 0.0);
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t a = 0; a < 3; ++a) mean[a] += pihat(j, a) / 5.0;
  }
  double max_norm = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    double s = 0.0;
    for (double v : pihat.row(j)) s += v * v;
    max_norm = std::max(max_norm, std::sqrt(s));
  }
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t a = 0; a < 3; ++a) {
      CHECK(std::fabs(r.centroids(j, a) - mean[a]) <= cfg.fusion_tol * (1 + max_norm));
    }
  }
  CHECK(extract_clusters(r.centroids, pihat, cfg.fusion_tol).k == 1);
}

TEST_CASE("three-point instance matches the subgradient oracle") {
  const auto pihat = rows({{1, 0}, {0.9, 0.1}, {0, 1}});
  const auto g = complete_graph(3);
  SolverConfig cfg;
  cfg.max_iter = 100000;
  const auto r = ama_solve(pihat, g, 0.05, cfg);
  CHECK(r.converged);
  const double expected = oracle::subgradient_minimum(oracle::make_problem(pihat, g, 0.05), 400000);
  CHECK(std::fabs(r.primal - expected) <= 1e-4 * std::fabs(expected));
  CHECK(r.primal == doctest::Approx(evaluate_objective(pihat, r.centroids, g, 0.05)));
}

TEST_CASE("dual feasibility, weak duality and monotone dual ascent") {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 2 + static_cast<int>(rng.uniform_int(9));
    const std::size_t d = 2 + rng.uniform_int(4);
    const auto pihat = random_pihat(rng, static_cast<std::size_t>(p), d);
    const auto g = random_graph(rng, p, 0.5);
    const double lambda = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
    SolverConfig cfg;
    cfg.record_dual_trace = true;
    cfg.max_iter = 3000;
    const auto r = ama_solve(pihat, g, lambda, cfg);
    for (std::size_t l = 0; l < g.edges.size(); ++l) {
      double s = 0.0;
      for (double v : r.duals.row(l)) s += v * v;
      CHECK(std::sqrt(s) <= lambda * g.edges[l].weight + 1e-10);
    }
    const auto gap = dual_gap(pihat, r.centroids, r.duals, g, lambda);
    CHECK(gap.gap >= -1e-10);
    for (std::size_t t = 1; t < r.dual_trace.size(); ++t) {
      CHECK(r.dual_trace[t] >= r.dual_trace[t - 1] - 1e-10);
    }
    for (std::size_t j = 0; j < static_cast<std::size_t>(p); ++j) {
      double s = 0.0;
      for (double v : r.centroids.row(j)) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::fabs(s - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("zero duals give zero dual objective; gap is primal at pihat") {
  Rng rng(13);
  const auto pihat = random_pihat(rng, 4, 3);
  const auto g = complete_graph(4);
  const RealMatrix zero(g.edges.size(), 3, 0.0);
  CHECK(dual_objective(pihat, zero, g) == 0.0);
  const auto gap = dual_gap(pihat, pihat, zero, g, 0.0);
  CHECK(gap.primal == 0.0);
  CHECK(gap.dual == 0.0);
}

TEST_CASE("converged solves meet the relative gap tolerance") {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pihat = random_pihat(rng, 16, 4);
    const auto g = random_graph(rng, 16, 0.3);
    const auto r = ama_solve(pihat, g, 0.01 + 0.05 * rng.uniform(), {});
    if (r.converged) CHECK(r.relative_gap() <= 1e-6);
  }
}

TEST_CASE("relabeling nodes permutes the solution rows") {
  Rng rng(15);
  const int p = 8;
  const auto pihat = random_pihat(rng, p, 3);
  const auto g = random_graph(rng, p, 0.6);
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[1], perm[4]);
  RealMatrix q(p, 3);
  for (int i = 0; i < p; ++i) {
    for (std::size_t a = 0; a < 3; ++a) q(static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]), a) = pihat(static_cast<std::size_t>(i), a);
  }
  WeightGraph h{p, {}};
  for (const auto& e : g.edges) {
    int a = perm[static_cast<std::size_t>(e.first)], b = perm[static_cast<std::size_t>(e.second)];
    if (a > b) std::swap(a, b);
    h.edges.push_back({a, b, e.weight});
  }
  std::sort(h.edges.begin(), h.edges.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.first, x.second) < std::pair(y.first, y.second); });
  SolverConfig cfg;
  cfg.dual_gap_tol = 1e-12;
  cfg.max_iter = 200000;
  const auto r1 = ama_solve(pihat, g, 0.03, cfg);
  const auto r2 = ama_solve(q, h, 0.03, cfg);
  for (int i = 0; i < p; ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      CHECK(r1.centroids(static_cast<std::size_t>(i), a) ==
            doctest::Approx(r2.centroids(static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]), a)).epsilon(1e-5));
    }
  }
}

TEST_CASE("cluster extraction") {
  const auto same = rows({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}});
  CHECK(extract_clusters(same, same, 1e-4).k == 1);
  const auto apart = rows({{1, 0}, {0.5, 0.5}, {0, 1}});
  const auto all = extract_clusters(apart, apart, 1e-4);
  CHECK(all.k == 3);
  CHECK(all.label == std::vector<int>{0, 1, 2});
  const auto b = rows({{1, 0}, {1, 0}, {0, 1}});
  const auto two = extract_clusters(b, b, 1e-4);
  CHECK(two.label == std::vector<int>{0, 0, 1});
  CHECK(two.k == 2);
  const std::vector<int> raw{5, 2, 5, 9};
  CHECK(PartitionLabels::canonical(raw).label == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("invalid solver inputs") {
  const auto pihat = rows({{1, 0}, {0, 1}});
  const auto g = complete_graph(2);
  CHECK_THROWS_AS(ama_solve(pihat, g, -1.0, {}), InvalidArgument);
  SolverConfig bad;
  bad.step = 1.5;  // 2 / p' = 1
  CHECK_THROWS_AS(ama_solve(pihat, g, 0.1, bad), InvalidArgument);
}

TEST_CASE("warm start reaches the cold-start solution") {
  Rng rng(16);
  const auto pihat = random_pihat(rng, 10, 4);
  const auto g = random_graph(rng, 10, 0.5);
  SolverConfig cfg;
  cfg.dual_gap_tol = 1e-10;
  cfg.max_iter = 200000;
  const auto first = ama_solve(pihat, g, 0.02, cfg);
  const auto cold = ama_solve(pihat, g, 0.04, cfg);
  const auto warm = ama_solve(pihat, g, 0.04, cfg, &first.duals);
  CHECK(warm.primal == doctest::Approx(cold.primal).epsilon(1e-8));
}

}
