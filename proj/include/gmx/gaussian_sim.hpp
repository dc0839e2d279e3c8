#pragma once

#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "gmx/rng.hpp"

namespace gmx {

enum class CovarianceFamily { iid, one_factor, log_decay };

/// How a log_decay model is sampled.
enum class LogDecaySampler {
  circulant,       // FFT circulant embedding, n log n per draw
  dense_cholesky,  // n x n triangular factor, n <= 4096 only
};

/// Correlation structure of a stationary standard Gaussian sequence.
///
/// log_decay uses r_k = gamma / ln(k + shift) for k >= 1, so that
/// r_k ln k -> gamma.
struct CovarianceSpec {
  CovarianceFamily family = CovarianceFamily::iid;
  double gamma = 0.0;
  double shift = std::numbers::e;
  LogDecaySampler sampler = LogDecaySampler::circulant;
};

struct SamplePath {
  std::vector<double> values;
  /// Realized common factor xi; present iff the model is one_factor.
  std::optional<double> latent_factor;
};

/// Immutable sampler for a length-n standard Gaussian path. Copies share
/// the precomputed factorization; concurrent sampling with distinct streams
/// is safe.
class GaussianModel {
 public:
  /// Throws InvalidParameter on precondition failure and
  /// NonEmbeddableCovariance when a circulant eigenvalue is below
  /// -1e-8 * (largest eigenvalue).
  static GaussianModel build(std::size_t n, const CovarianceSpec& spec);

  std::size_t n() const noexcept { return n_; }
  const CovarianceSpec& spec() const noexcept { return spec_; }
  /// rho_n = gamma / ln n for one_factor, 0 otherwise.
  double rho() const noexcept { return rho_; }

  /// Exact model covariance at lag k, 0 <= k < n.
  double correlation(std::size_t lag) const;

  SamplePath sample(Stream& stream) const;
  /// Writes one path into out (size n) and returns the latent factor for
  /// one_factor models.
  std::optional<double> sample_into(Stream& stream, std::span<double> out) const;

  /// Circulant eigenvalues after clipping (log_decay with circulant
  /// sampler only; empty otherwise).
  std::span<const double> spectrum() const noexcept;
  /// Most negative eigenvalue before clipping (0 when not applicable).
  double min_raw_eigenvalue() const noexcept { return min_raw_eigenvalue_; }

 private:
  struct Circulant;
  struct Dense;

  GaussianModel() = default;

  std::size_t n_ = 0;
  CovarianceSpec spec_;
  double rho_ = 0.0;
  double min_raw_eigenvalue_ = 0.0;
  std::shared_ptr<const Circulant> circulant_;
  std::shared_ptr<const Dense> dense_;
};

/// r_k for the log_decay family (k >= 1), 1 at k = 0.
double log_decay_correlation(double gamma, double shift, std::size_t lag);

}  // namespace gmx
