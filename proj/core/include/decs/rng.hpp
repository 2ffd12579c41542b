#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace decs {

/// Counter-based Philox4x32-10 generator.
///
/// The state is (seed, stream, block counter); output is a pure function of
/// that triple, so streams are reproducible across platforms and independent
/// of scheduling. `split` derives a child generator deterministically from the
/// parent's identity without advancing the parent.
///
/// All distribution helpers are implemented here rather than via <random>
/// distributions, whose algorithms differ between standard libraries.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "philox4x32-10";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream identified by `id`.
  Rng split(std::uint64_t id) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  bool bernoulli(double prob) { return uniform() < prob; }
  /// +1 or -1 with equal probability.
  double sign() { return (next_u32() & 1u) ? 1.0 : -1.0; }

  double normal();
  /// Exponential with rate 1.
  double exponential();
  /// Standard Gumbel (location 0, scale 1).
  double gumbel();

  /// Uniform random permutation of {0, ..., n-1} (Fisher-Yates).
  std::vector<int> permutation(int n);

  /// Raw Philox block for (key, counter); exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int available_ = 0;
};

}  // namespace decs
