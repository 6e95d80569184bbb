#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace smm {

/// Seedable generator with platform-independent draws. The engine is
/// std::mt19937_64 (fully specified by the standard); the distributions are
/// implemented here because the standard library's are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n - 1}, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Gamma(shape, 1) (Marsaglia-Tsang, with the shape < 1 boost).
  double gamma(double shape);
  /// Normalized independent gamma draws; throws InvalidArgument on
  /// non-positive parameters.
  std::vector<double> dirichlet(std::span<const double> alpha);
  /// Index drawn from a probability vector (inverse CDF).
  int categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed of replicate r's independent stream.
inline std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t r) {
  return base + r;
}

}  // namespace smm
