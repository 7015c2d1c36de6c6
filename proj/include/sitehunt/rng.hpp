#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace sitehunt {

/// xoshiro256** seeded through splitmix64.
///
/// Every draw the project makes goes through this type rather than the
/// <random> distributions, whose algorithms differ between standard library
/// implementations. Changing the output sequence of any member function is a
/// format break for stored execution records; bump kVersion if it happens.
class Rng {
 public:
  static constexpr int kVersion = 1;
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Generator for substream `stream` of `seed`. Distinct (seed, stream)
  /// pairs give statistically independent sequences.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);
  static Rng derive(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform real in [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);
/// Deterministic 64-bit mix of a seed with a stream tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t hash_tag(std::string_view tag);

}  // namespace sitehunt
