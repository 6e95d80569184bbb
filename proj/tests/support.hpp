#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "smm/markov_core.hpp"
#include "smm/matrix.hpp"
#include "smm/random.hpp"

namespace testing_support {

inline smm::RealMatrix rows(std::initializer_list<std::initializer_list<double>> values) {
  const std::size_t r = values.size();
  const std::size_t c = values.begin()->size();
  smm::RealMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : values) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline smm::RealMatrix rows(const std::vector<std::vector<double>>& values) {
  smm::RealMatrix m(values.size(), values.front().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values[i].size(); ++j) m(i, j) = values[i][j];
  }
  return m;
}

inline std::vector<int> random_codes(smm::Rng& rng, std::size_t n, int d) {
  std::vector<int> out(n);
  for (auto& c : out) c = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
  return out;
}

inline smm::ContextCounts count_string(const std::string& s, const std::string& symbols, int m) {
  const auto alphabet = smm::Alphabet::from_chars(symbols);
  return smm::count_transitions(smm::encode_sequence(s, alphabet), m,
                                static_cast<int>(alphabet.size()));
}

}  // namespace testing_support
