#pragma once

#include <cstdint>
#include <random>

namespace epuc {

/// Portable seeded generator.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
/// the standard specifies bit for bit. The standard distributions are not
/// portable, so every draw below is derived from raw engine output here.
/// (seed, stream) pairs give independent substreams, e.g. one per bootstrap
/// replicate.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n); unbiased. n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal (Marsaglia polar method, spare value cached).
  double normal();

  /// Gamma(shape, 1) (Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost).
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace epuc
