#include "smm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "smm/errors.hpp"

namespace smm {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Projects each row of pihat + delta onto the simplex and evaluates the primal.
double primal_at(const RealMatrix& pihat, const RealMatrix& delta,
                 const WeightGraph& weights, double lambda, RealMatrix& b) {
  const std::size_t p = pihat.rows(), d = pihat.cols();
  for (std::size_t j = 0; j < p; ++j) {
    auto bj = b.row(j);
    auto pj = pihat.row(j);
    auto dj = delta.row(j);
    for (std::size_t a = 0; a < d; ++a) bj[a] = pj[a] + dj[a];
    project_simplex(bj);
  }
  return evaluate_objective(pihat, b, weights, lambda);
}

double dual_from_delta(std::span<const double> duals,
                       std::span<const double> pihat_diff,
                       std::span<const double> delta) {
  double quad = 0.0;
  for (double v : delta) quad += v * v;
  double lin = 0.0;
  for (std::size_t i = 0; i < duals.size(); ++i) lin += duals[i] * pihat_diff[i];
  return -0.5 * quad - lin;
}

void aggregate_into(const RealMatrix& duals, const WeightGraph& weights,
                    RealMatrix& delta) {
  delta.fill(0.0);
  const std::size_t d = delta.cols();
  for (std::size_t l = 0; l < weights.edges.size(); ++l) {
    const auto& e = weights.edges[l];
    const double* g = duals.row(l).data();
    double* a = delta.row(static_cast<std::size_t>(e.first)).data();
    double* b = delta.row(static_cast<std::size_t>(e.second)).data();
    for (std::size_t c = 0; c < d; ++c) {
      a[c] += g[c];
      b[c] -= g[c];
    }
  }
}

}  // namespace

double SolverResult::relative_gap() const {
  if (primal == 0.0) return gap <= 0.0 ? 0.0 : gap;
  return gap / std::abs(primal);
}

PartitionLabels PartitionLabels::canonical(std::span<const int> raw) {
  PartitionLabels out;
  out.label.resize(raw.size());
  std::vector<std::pair<int, int>> seen;  // raw id -> canonical id
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(),
                           [&](const auto& s) { return s.first == raw[i]; });
    if (it == seen.end()) {
      seen.emplace_back(raw[i], static_cast<int>(seen.size()));
      out.label[i] = seen.back().second;
    } else {
      out.label[i] = it->second;
    }
  }
  out.k = static_cast<int>(seen.size());
  return out;
}

double evaluate_objective(const RealMatrix& pihat, const RealMatrix& centroids,
                          const WeightGraph& weights, double lambda) {
  const std::size_t d = pihat.cols();
  double data = 0.0;
  for (std::size_t j = 0; j < pihat.rows(); ++j) {
    for (std::size_t a = 0; a < d; ++a) {
      const double r = pihat(j, a) - centroids(j, a);
      data += r * r;
    }
  }
  double penalty = 0.0;
  if (lambda != 0.0) {
    for (const auto& e : weights.edges) {
      auto b1 = centroids.row(static_cast<std::size_t>(e.first));
      auto b2 = centroids.row(static_cast<std::size_t>(e.second));
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double diff = b1[a] - b2[a];
        s += diff * diff;
      }
      penalty += e.weight * std::sqrt(s);
    }
  }
  return 0.5 * data + lambda * penalty;
}

void project_ball(std::span<double> x, double radius) {
  const double n = norm2(x);
  if (n <= radius) return;
  const double scale = radius / n;
  for (double& v : x) v *= scale;
}

std::vector<double> project_ball(std::span<const double> x, double radius) {
  std::vector<double> out(x.begin(), x.end());
  project_ball(std::span<double>(out), radius);
  return out;
}

void project_simplex(std::span<double> x) {
  double sum = 0.0;
  double lo = 0.0;
  for (double v : x) {
    sum += v;
    lo = std::min(lo, v);
  }
  if (lo >= 0.0 && std::abs(sum - 1.0) <= 1e-12) return;
  std::vector<double> u(x.begin(), x.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (double& v : x) v = std::max(v - theta, 0.0);
}

RealMatrix dual_aggregate(const RealMatrix& duals, const WeightGraph& weights,
                          std::size_t node_count) {
  RealMatrix delta(node_count, duals.cols(), 0.0);
  aggregate_into(duals, weights, delta);
  return delta;
}

double dual_objective(const RealMatrix& pihat, const RealMatrix& duals,
                      const WeightGraph& weights) {
  const RealMatrix delta = dual_aggregate(duals, weights, pihat.rows());
  double quad = 0.0;
  for (double v : delta.data()) quad += v * v;
  double lin = 0.0;
  for (std::size_t l = 0; l < weights.edges.size(); ++l) {
    const auto& e = weights.edges[l];
    for (std::size_t a = 0; a < pihat.cols(); ++a) {
      lin += duals(l, a) * (pihat(e.first, a) - pihat(e.second, a));
    }
  }
  return -0.5 * quad - lin;
}

DualityGap dual_gap(const RealMatrix& pihat, const RealMatrix& centroids,
                    const RealMatrix& duals, const WeightGraph& weights,
                    double lambda) {
  DualityGap out;
  out.primal = evaluate_objective(pihat, centroids, weights, lambda);
  out.dual = dual_objective(pihat, duals, weights);
  out.gap = out.primal - out.dual;
  return out;
}

SolverResult ama_solve(const RealMatrix& pihat, const WeightGraph& weights,
                       double lambda, const SolverConfig& config,
                       const RealMatrix* warm_start) {
  const std::size_t p = pihat.rows(), d = pihat.cols();
  const std::size_t edge_count = weights.edges.size();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be finite and nonnegative");
  }
  if (static_cast<std::size_t>(weights.node_count) != p) {
    throw InvalidArgument("weight graph does not match the number of rows");
  }
  const double step = config.step.value_or(1.0 / static_cast<double>(p));
  if (!(step > 0.0) || !(step < 2.0 / static_cast<double>(p))) {
    throw InvalidArgument("step must lie in (0, 2/p')");
  }
  if (config.max_iter < 1 || config.check_every < 1) {
    throw InvalidArgument("max_iter and check_every must be positive");
  }

  SolverResult result;
  result.duals = RealMatrix(edge_count, d, 0.0);
  if (warm_start != nullptr && warm_start->rows() == edge_count &&
      warm_start->cols() == d) {
    result.duals = *warm_start;
  }
  std::vector<double> radius(edge_count);
  for (std::size_t l = 0; l < edge_count; ++l) {
    radius[l] = lambda * weights.edges[l].weight;
    project_ball(result.duals.row(l), radius[l]);
  }

  RealMatrix pihat_diff(edge_count, d);
  for (std::size_t l = 0; l < edge_count; ++l) {
    const auto& e = weights.edges[l];
    for (std::size_t a = 0; a < d; ++a) {
      pihat_diff(l, a) = pihat(e.first, a) - pihat(e.second, a);
    }
  }

  RealMatrix delta(p, d, 0.0);
  RealMatrix b(p, d, 0.0);
  aggregate_into(result.duals, weights, delta);

  auto& gamma = result.duals;
  int t = 0;
  bool checked_last = false;
  while (t < config.max_iter) {
    ++t;
    for (std::size_t l = 0; l < edge_count; ++l) {
      const auto& e = weights.edges[l];
      double* g = gamma.row(l).data();
      const double* pd = pihat_diff.row(l).data();
      const double* d1 = delta.row(static_cast<std::size_t>(e.first)).data();
      const double* d2 = delta.row(static_cast<std::size_t>(e.second)).data();
      double sq = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        g[a] -= step * (pd[a] + d1[a] - d2[a]);
        sq += g[a] * g[a];
      }
      if (sq > radius[l] * radius[l]) {
        const double scale = radius[l] / std::sqrt(sq);
        for (std::size_t a = 0; a < d; ++a) g[a] *= scale;
      }
    }
    aggregate_into(gamma, weights, delta);

    const bool check = t == 1 || t % config.check_every == 0;
    if (config.record_dual_trace) {
      result.dual_trace.push_back(
          dual_from_delta(gamma.data(), pihat_diff.data(), delta.data()));
    }
    checked_last = check;
    if (!check) continue;
    result.dual = dual_from_delta(gamma.data(), pihat_diff.data(), delta.data());
    result.primal = primal_at(pihat, delta, weights, lambda, b);
    result.gap = result.primal - result.dual;
    if (result.gap <= config.dual_gap_tol * std::abs(result.primal) ||
        result.gap <= 1e-14) {
      result.converged = true;
      break;
    }
  }
  if (!checked_last) {
    result.dual = dual_from_delta(gamma.data(), pihat_diff.data(), delta.data());
    result.primal = primal_at(pihat, delta, weights, lambda, b);
    result.gap = result.primal - result.dual;
    result.converged = result.gap <= config.dual_gap_tol * std::abs(result.primal) ||
                       result.gap <= 1e-14;
  }
  result.iterations = t;

  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double raw = pihat(j, a) + delta(j, a);
      sum += raw;
      result.raw_min_entry = std::min(result.raw_min_entry, raw);
    }
    result.raw_row_sum_error =
        std::max(result.raw_row_sum_error, std::abs(sum - 1.0));
  }
  result.centroids = std::move(b);
  return result;
}

PartitionLabels extract_clusters(const RealMatrix& centroids,
                                 const RealMatrix& pihat, double tau) {
  double scale = 0.0;
  for (std::size_t j = 0; j < pihat.rows(); ++j) {
    scale = std::max(scale, norm2(pihat.row(j)));
  }
  const double threshold = tau * (1.0 + scale);
  const std::size_t p = centroids.rows();
  std::vector<int> raw(p, -1);
  int next = 0;
  for (std::size_t j1 = 0; j1 < p; ++j1) {
    if (raw[j1] >= 0) continue;
    raw[j1] = next;
    for (std::size_t j2 = j1 + 1; j2 < p; ++j2) {
      if (raw[j2] >= 0) continue;
      double s = 0.0;
      for (std::size_t a = 0; a < centroids.cols(); ++a) {
        const double diff = centroids(j1, a) - centroids(j2, a);
        s += diff * diff;
      }
      if (std::sqrt(s) <= threshold) raw[j2] = next;
    }
    ++next;
  }
  return PartitionLabels::canonical(raw);
}

}  // namespace smm
