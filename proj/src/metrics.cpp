#include "smm/metrics.hpp"

#include <map>

#include "smm/errors.hpp"

namespace smm {

namespace {

std::vector<int> compact(std::span<const int> labels, std::size_t& count) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  count = ids.size();
  return out;
}

double choose2(long long n) { return 0.5 * static_cast<double>(n) * (n - 1); }

}  // namespace

ContingencyTable contingency_table(std::span<const int> x,
                                   std::span<const int> y) {
  if (x.size() != y.size()) {
    throw MismatchedElements("partitions cover different numbers of elements");
  }
  std::size_t r = 0, c = 0;
  const auto cx = compact(x, r);
  const auto cy = compact(y, c);
  ContingencyTable t;
  t.cells = CountMatrix(r, c, 0);
  t.rows.assign(r, 0);
  t.cols.assign(c, 0);
  t.total = static_cast<long long>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto a = static_cast<std::size_t>(cx[i]);
    const auto b = static_cast<std::size_t>(cy[i]);
    ++t.cells(a, b);
    ++t.rows[a];
    ++t.cols[b];
  }
  return t;
}

double rand_index(std::span<const int> x, std::span<const int> y) {
  const ContingencyTable t = contingency_table(x, y);
  if (t.total < 2) throw MismatchedElements("rand index needs p >= 2");
  double same_both = 0.0, same_x = 0.0, same_y = 0.0;
  for (long long v : t.cells.data()) same_both += choose2(v);
  for (long long v : t.rows) same_x += choose2(v);
  for (long long v : t.cols) same_y += choose2(v);
  const double pairs = choose2(t.total);
  // Pairs split in both = all - same_x - same_y + same_both.
  const double diff_both = pairs - same_x - same_y + same_both;
  return (same_both + diff_both) / pairs;
}

double adjusted_rand_index(std::span<const int> x, std::span<const int> y) {
  const ContingencyTable t = contingency_table(x, y);
  if (t.total < 2) throw MismatchedElements("adjusted rand index needs p >= 2");
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (long long v : t.cells.data()) index += choose2(v);
  for (long long v : t.rows) sum_a += choose2(v);
  for (long long v : t.cols) sum_b += choose2(v);
  const double expected = sum_a * sum_b / choose2(t.total);
  const double maximum = 0.5 * (sum_a + sum_b);
  const double denom = maximum - expected;
  if (denom == 0.0) return same_partition(x, y) ? 1.0 : 0.0;
  return (index - expected) / denom;
}

bool same_partition(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size()) return false;
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto [f, fi] = fwd.emplace(x[i], y[i]);
    auto [b, bi] = bwd.emplace(y[i], x[i]);
    if (f->second != y[i] || b->second != x[i]) return false;
  }
  return true;
}

}  // namespace smm
