#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cmdp {

/// Seeded random stream. Every sampling routine in the library draws from an
/// explicitly passed RngStream so that (seed, inputs) fully determine output.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  int uniform_int(int n);

  /// Index drawn from an (unnormalized is fine) nonnegative weight vector.
  int categorical(std::span<const double> weights);

  /// Standard exponential variate.
  double exponential();

  /// Independent child stream; the parent is not advanced.
  RngStream derive(std::uint64_t stream_id) const;

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to decorrelate user-supplied seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace cmdp
