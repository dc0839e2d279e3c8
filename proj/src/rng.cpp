#include "gmx/rng.hpp"

#include <cmath>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace gmx {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t index,
                         StreamLabel label) noexcept {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(label));
  h = mix64(h ^ index);
  return h;
}

Stream::Stream(std::uint64_t key) : engine_(mix64(key)) {}

double Stream::exponential() {
  return boost::random::exponential_distribution<double>(1.0)(engine_);
}

std::uint64_t Stream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  return static_cast<std::uint64_t>(
      boost::random::poisson_distribution<long long, double>(mean)(engine_));
}

std::uint64_t Stream::binomial(std::uint64_t trials, double p) {
  if (trials == 0 || !(p > 0.0)) return 0;
  if (p >= 1.0) return trials;
  return static_cast<std::uint64_t>(
      boost::random::binomial_distribution<long long, double>(
          static_cast<long long>(trials), p)(engine_));
}

double Stream::beta(double alpha, double beta) {
  return boost::random::beta_distribution<double>(alpha, beta)(engine_);
}

}  // namespace gmx
