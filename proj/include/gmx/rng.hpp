#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace gmx {

/// Component labels for per-replication substreams. Each label yields a
/// distinct keyed derivation from (master_seed, index).
enum class StreamLabel : std::uint64_t {
  path = 0x70617468,        // "path"
  indicators = 0x696e6463,  // "indc"
  oracle = 0x6f72636c,      // "orcl"
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Keyed hash of (master_seed, index, label). Distinct labels never collide
/// for the same (master_seed, index) because the label enters before the
/// index is mixed.
std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t index,
                         StreamLabel label) noexcept;

/// A reproducible random stream. Satisfies UniformRandomBitGenerator so it
/// can drive standard and Boost distributions directly.
///
/// All variate generators use Boost.Random algorithms, which are fixed across
/// standard library implementations, so a given key reproduces the same
/// variates on every platform.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key);

  static Stream derive(std::uint64_t master_seed, std::uint64_t index,
                       StreamLabel label) {
    return Stream(derive_key(master_seed, index, label));
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }
  /// Standard normal (ziggurat, exact in distribution).
  double normal() { return normal_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard exponential.
  double exponential();
  /// Poisson(mean); mean <= 0 yields 0.
  std::uint64_t poisson(double mean);
  /// Binomial(trials, p) with p clamped to [0, 1].
  std::uint64_t binomial(std::uint64_t trials, double p);
  double beta(double alpha, double beta);

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace gmx
