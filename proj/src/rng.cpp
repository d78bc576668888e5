#include "cmdp/rng.hpp"

#include <cmath>

namespace cmdp {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

int RngStream::uniform_int(int n) {
  if (n <= 1) return 0;
  const auto bound = static_cast<std::uint64_t>(n);
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<int>(v % bound);
}

int RngStream::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform() * total;
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return last_positive;
}

double RngStream::exponential() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return -std::log(u);
}

RngStream RngStream::derive(std::uint64_t stream_id) const {
  return RngStream(mix_seed(seed_ ^ mix_seed(stream_id + 0x632BE59BD9B4E019ULL)));
}

}  // namespace cmdp
