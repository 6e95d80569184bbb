#include "smm/markov_core.hpp"

#include <cmath>
#include <limits>

#include "smm/errors.hpp"

namespace smm {

Alphabet::Alphabet(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) {
    throw InvalidArgument("alphabet needs at least two symbols");
  }
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw InvalidArgument("empty alphabet symbol");
    auto [it, inserted] = codes_.emplace(symbols_[i], static_cast<int>(i));
    if (!inserted) {
      throw InvalidArgument("duplicate alphabet symbol '" + symbols_[i] + "'");
    }
  }
}

Alphabet Alphabet::from_chars(std::string_view chars) {
  std::vector<std::string> symbols;
  symbols.reserve(chars.size());
  for (char c : chars) symbols.emplace_back(1, c);
  return Alphabet(std::move(symbols));
}

int Alphabet::find(std::string_view token) const {
  auto it = codes_.find(std::string(token));
  return it == codes_.end() ? -1 : it->second;
}

namespace {

template <class Tokens>
std::vector<EncodedSequence> encode_runs_impl(const Tokens& tokens,
                                              std::size_t count,
                                              const Alphabet& alphabet,
                                              UnknownTokenPolicy policy) {
  std::vector<EncodedSequence> runs;
  EncodedSequence current;
  current.codes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string_view token = tokens(i);
    int code = alphabet.find(token);
    if (code >= 0) {
      current.codes.push_back(code);
      continue;
    }
    if (policy == UnknownTokenPolicy::reject) {
      throw UnknownToken(i, std::string(token));
    }
    if (!current.codes.empty()) {
      runs.push_back(std::move(current));
      current = {};
    }
  }
  // Under reject there is always exactly one (possibly empty) run.
  if (!current.codes.empty() || policy == UnknownTokenPolicy::reject) {
    runs.push_back(std::move(current));
  }
  return runs;
}

}  // namespace

std::vector<EncodedSequence> encode_runs(std::span<const std::string> tokens,
                                         const Alphabet& alphabet,
                                         UnknownTokenPolicy policy) {
  return encode_runs_impl(
      [&](std::size_t i) { return std::string_view(tokens[i]); },
      tokens.size(), alphabet, policy);
}

std::vector<EncodedSequence> encode_runs(std::string_view chars,
                                         const Alphabet& alphabet,
                                         UnknownTokenPolicy policy) {
  return encode_runs_impl([&](std::size_t i) { return chars.substr(i, 1); },
                          chars.size(), alphabet, policy);
}

EncodedSequence encode_sequence(std::span<const std::string> tokens,
                                const Alphabet& alphabet) {
  return std::move(
      encode_runs(tokens, alphabet, UnknownTokenPolicy::reject).front());
}

EncodedSequence encode_sequence(std::string_view chars,
                                const Alphabet& alphabet) {
  return std::move(
      encode_runs(chars, alphabet, UnknownTokenPolicy::reject).front());
}

std::size_t context_count(int order, int alphabet_size) {
  std::size_t p = 1;
  for (int i = 0; i < order; ++i) {
    if (p > std::numeric_limits<std::size_t>::max() /
                static_cast<std::size_t>(alphabet_size)) {
      throw InvalidArgument("context space d^m overflows");
    }
    p *= static_cast<std::size_t>(alphabet_size);
  }
  return p;
}

std::size_t context_index(std::span<const int> tuple, int alphabet_size) {
  std::size_t index = 0;
  for (int code : tuple) {
    index = index * static_cast<std::size_t>(alphabet_size) +
            static_cast<std::size_t>(code);
  }
  return index;
}

std::vector<int> context_tuple(std::size_t index, int order,
                               int alphabet_size) {
  std::vector<int> tuple(static_cast<std::size_t>(order));
  for (int i = order - 1; i >= 0; --i) {
    tuple[static_cast<std::size_t>(i)] =
        static_cast<int>(index % static_cast<std::size_t>(alphabet_size));
    index /= static_cast<std::size_t>(alphabet_size);
  }
  return tuple;
}

long long ContextCounts::transition_total() const {
  long long total = 0;
  for (long long v : context_total) total += v;
  return total;
}

ContextCounts count_transitions(std::span<const EncodedSequence> runs,
                                int order, int alphabet_size) {
  if (order < 1) throw InvalidArgument("order must be at least 1");
  if (alphabet_size < 2) throw InvalidArgument("alphabet size must be >= 2");
  const std::size_t p = context_count(order, alphabet_size);
  const auto d = static_cast<std::size_t>(alphabet_size);
  const auto m = static_cast<std::size_t>(order);

  ContextCounts counts;
  counts.order = order;
  counts.alphabet_size = alphabet_size;
  counts.context_total.assign(p, 0);
  counts.transition = CountMatrix(p, d, 0);

  // Rolling index: drop the oldest digit, append the newest.
  const std::size_t high = p / d;
  bool any = false;
  for (const auto& run : runs) {
    const auto& x = run.codes;
    for (int code : x) {
      if (code < 0 || static_cast<std::size_t>(code) >= d) {
        throw InvalidArgument("symbol code out of range");
      }
    }
    counts.sequence_length += static_cast<long long>(x.size());
    if (x.size() < m + 1) continue;
    any = true;
    counts.window_count += static_cast<long long>(x.size() - m + 1);
    std::size_t ctx = context_index(std::span<const int>(x.data(), m),
                                    alphabet_size);
    for (std::size_t t = m; t < x.size(); ++t) {
      const auto next = static_cast<std::size_t>(x[t]);
      ++counts.context_total[ctx];
      ++counts.transition(ctx, next);
      ctx = (ctx % high) * d + next;
    }
  }
  if (!any) {
    throw SequenceTooShort("sequence shorter than order + 1 = " +
                           std::to_string(order + 1));
  }
  return counts;
}

ContextCounts count_transitions(const EncodedSequence& seq, int order,
                                int alphabet_size) {
  return count_transitions(std::span<const EncodedSequence>(&seq, 1), order,
                           alphabet_size);
}

std::vector<int> EmpiricalTransitions::observed_contexts() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    if (observed[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

RealMatrix EmpiricalTransitions::observed_rows() const {
  const auto index = observed_contexts();
  RealMatrix rows(index.size(), pihat.cols());
  for (std::size_t r = 0; r < index.size(); ++r) {
    auto src = pihat.row(static_cast<std::size_t>(index[r]));
    std::copy(src.begin(), src.end(), rows.row(r).begin());
  }
  return rows;
}

EmpiricalTransitions empirical_transitions(const ContextCounts& counts) {
  const std::size_t p = counts.context_space();
  const auto d = static_cast<std::size_t>(counts.alphabet_size);
  EmpiricalTransitions out;
  out.pihat = RealMatrix(p, d, std::numeric_limits<double>::quiet_NaN());
  out.observed.assign(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    const long long total = counts.context_total[j];
    if (total <= 0) continue;
    out.observed[j] = true;
    for (std::size_t a = 0; a < d; ++a) {
      out.pihat(j, a) = static_cast<double>(counts.transition(j, a)) /
                        static_cast<double>(total);
    }
  }
  return out;
}

}  // namespace smm
