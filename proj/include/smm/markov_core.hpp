#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smm/matrix.hpp"

namespace smm {

/// Ordered set of distinct tokens with a bijective code map onto [0, d).
class Alphabet {
 public:
  Alphabet() = default;
  /// Throws InvalidArgument on duplicates or when fewer than two symbols.
  explicit Alphabet(std::vector<std::string> symbols);

  /// One symbol per character, e.g. "ACGT".
  static Alphabet from_chars(std::string_view chars);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(int code) const { return symbols_.at(code); }

  /// Code of a token, or -1 when the token is not in the alphabet.
  int find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token) >= 0; }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> codes_;
};

struct EncodedSequence {
  std::vector<int> codes;
  std::size_t size() const { return codes.size(); }
};

enum class UnknownTokenPolicy { reject, drop_and_split };

/// Encodes tokens; throws UnknownToken on the first token not in the alphabet.
EncodedSequence encode_sequence(std::span<const std::string> tokens,
                                const Alphabet& alphabet);
/// Character-per-token convenience overload.
EncodedSequence encode_sequence(std::string_view chars,
                                const Alphabet& alphabet);

/// Encodes tokens into contiguous runs of valid symbols. Under reject the
/// result has exactly one run; under drop_and_split every unknown token ends
/// the current run so no transition crosses it. Empty runs are not emitted.
std::vector<EncodedSequence> encode_runs(std::span<const std::string> tokens,
                                         const Alphabet& alphabet,
                                         UnknownTokenPolicy policy);
std::vector<EncodedSequence> encode_runs(std::string_view chars,
                                         const Alphabet& alphabet,
                                         UnknownTokenPolicy policy);

/// Base-d positional index of an m-tuple ordered oldest to newest; the oldest
/// symbol is the most significant digit.
std::size_t context_index(std::span<const int> tuple, int alphabet_size);
std::vector<int> context_tuple(std::size_t index, int order, int alphabet_size);

/// p = d^m.
std::size_t context_count(int order, int alphabet_size);

struct ContextCounts {
  int order = 0;
  int alphabet_size = 0;
  /// N_{sigma_j}: number of times context j is followed by an observed symbol.
  std::vector<long long> context_total;
  /// N_{sigma_j, a}, p x d.
  CountMatrix transition;
  /// Number of complete m-windows, n - m + 1 summed over runs.
  long long window_count = 0;
  /// Raw number of symbols, summed over runs.
  long long sequence_length = 0;

  std::size_t context_space() const { return context_total.size(); }
  /// Sum of all transition counts, n - m summed over runs.
  long long transition_total() const;
};

/// Counts transitions over every window ending at t = m..n-1 (1-based).
/// Throws SequenceTooShort when n < m + 1.
ContextCounts count_transitions(const EncodedSequence& seq, int order,
                                int alphabet_size);
/// Accumulates over independent runs; runs shorter than m + 1 contribute
/// nothing. Throws SequenceTooShort when no run is long enough.
ContextCounts count_transitions(std::span<const EncodedSequence> runs,
                                int order, int alphabet_size);

struct EmpiricalTransitions {
  /// p x d; unobserved rows hold NaN so accidental use is visible.
  RealMatrix pihat;
  std::vector<bool> observed;

  /// Context indices with positive totals, ascending.
  std::vector<int> observed_contexts() const;
  /// Compact p' x d matrix of the observed rows, in observed_contexts() order.
  RealMatrix observed_rows() const;
};

EmpiricalTransitions empirical_transitions(const ContextCounts& counts);

}  // namespace smm
