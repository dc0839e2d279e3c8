#include "gmx/gaussian_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <mutex>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <fftw3.h>

#include "gmx/errors.hpp"

namespace gmx {

namespace {

// Plan creation and destruction in FFTW are not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t size)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

constexpr std::size_t kDenseLimit = 4096;

}  // namespace

double log_decay_correlation(double gamma, double shift, std::size_t lag) {
  if (lag == 0) return 1.0;
  return gamma / std::log(static_cast<double>(lag) + shift);
}

struct GaussianModel::Circulant {
  std::size_t size = 0;  // embedding length m, a power of two >= 2n
  std::vector<double> sqrt_scaled_eigen;  // sqrt(lambda_j / m)
  std::vector<double> eigen;              // clipped eigenvalues
  fftw_plan plan = nullptr;

  Circulant() = default;
  Circulant(const Circulant&) = delete;
  Circulant& operator=(const Circulant&) = delete;
  ~Circulant() {
    if (plan != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

struct GaussianModel::Dense {
  std::size_t n = 0;
  std::vector<double> lower;  // row-major n x n Cholesky factor
};

GaussianModel GaussianModel::build(std::size_t n, const CovarianceSpec& spec) {
  if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) {
    throw InvalidParameter("gamma must be finite and >= 0");
  }
  GaussianModel model;
  model.n_ = n;
  model.spec_ = spec;

  switch (spec.family) {
    case CovarianceFamily::iid:
      if (n < 2) throw InvalidParameter("iid model requires n >= 2");
      if (spec.gamma != 0.0) throw InvalidParameter("iid model requires gamma = 0");
      return model;

    case CovarianceFamily::one_factor: {
      if (n < 3) throw InvalidParameter("one_factor model requires n >= 3");
      const double log_n = std::log(static_cast<double>(n));
      if (spec.gamma >= log_n) {
        throw InvalidParameter("one_factor model requires gamma < ln n (gamma = " +
                               std::to_string(spec.gamma) + ", ln n = " +
                               std::to_string(log_n) + ")");
      }
      model.rho_ = spec.gamma / log_n;
      return model;
    }

    case CovarianceFamily::log_decay:
      break;
  }

  if (n < 2) throw InvalidParameter("log_decay model requires n >= 2");
  if (!(spec.shift > 1.0 - std::numbers::e)) {
    throw InvalidParameter("log_decay shift must exceed 1 - e");
  }
  // r_k is decreasing in k, so |r_k| < 1 for all k >= 1 iff r_1 < 1.
  if (log_decay_correlation(spec.gamma, spec.shift, 1) >= 1.0) {
    throw InvalidParameter("log_decay requires |r_1| = gamma / ln(1 + shift) < 1");
  }

  if (spec.sampler == LogDecaySampler::dense_cholesky) {
    if (n > kDenseLimit) {
      throw InvalidParameter("dense_cholesky sampler is limited to n <= 4096");
    }
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        cov(i, j) = log_decay_correlation(spec.gamma, spec.shift, i > j ? i - j : j - i);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NonEmbeddableCovariance("log_decay covariance is not positive definite at this n");
    }
    auto dense = std::make_shared<Dense>();
    dense->n = n;
    dense->lower.assign(n * n, 0.0);
    const Eigen::MatrixXd lower = llt.matrixL();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) dense->lower[i * n + j] = lower(i, j);
    }
    model.dense_ = std::move(dense);
    return model;
  }

  const std::size_t m = std::bit_ceil(2 * n);
  auto circ = std::make_shared<Circulant>();
  circ->size = m;

  FftwBuffer in(m);
  FftwBuffer out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t lag = std::min(j, m - j);
    in.data[j][0] = log_decay_correlation(spec.gamma, spec.shift, lag);
    in.data[j][1] = 0.0;
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    circ->plan = fftw_plan_dft_1d(static_cast<int>(m), in.data, out.data, FFTW_FORWARD,
                                  FFTW_ESTIMATE);
  }
  if (circ->plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
  // FFTW_ESTIMATE does not touch the arrays, so the input is intact.
  fftw_execute(circ->plan);

  circ->eigen.resize(m);
  double max_eigen = 0.0;
  double min_eigen = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    circ->eigen[j] = out.data[j][0];
    max_eigen = std::max(max_eigen, circ->eigen[j]);
    min_eigen = std::min(min_eigen, circ->eigen[j]);
  }
  const double tol_clip = 1e-8 * max_eigen;
  if (min_eigen < -tol_clip) {
    throw NonEmbeddableCovariance(
        "circulant embedding of log_decay covariance has eigenvalue " +
        std::to_string(min_eigen) + " below -tol_clip = " + std::to_string(-tol_clip) +
        " (m = " + std::to_string(m) + ")");
  }
  circ->sqrt_scaled_eigen.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    circ->eigen[j] = std::max(circ->eigen[j], 0.0);
    circ->sqrt_scaled_eigen[j] = std::sqrt(circ->eigen[j] / static_cast<double>(m));
  }
  model.min_raw_eigenvalue_ = min_eigen;
  model.circulant_ = std::move(circ);
  return model;
}

double GaussianModel::correlation(std::size_t lag) const {
  if (lag >= n_) throw InvalidParameter("lag must satisfy 0 <= k < n");
  if (lag == 0) return 1.0;
  switch (spec_.family) {
    case CovarianceFamily::iid:
      return 0.0;
    case CovarianceFamily::one_factor:
      return rho_;
    case CovarianceFamily::log_decay:
      return log_decay_correlation(spec_.gamma, spec_.shift, lag);
  }
  return 0.0;
}

std::span<const double> GaussianModel::spectrum() const noexcept {
  if (!circulant_) return {};
  return circulant_->eigen;
}

SamplePath GaussianModel::sample(Stream& stream) const {
  SamplePath path;
  path.values.resize(n_);
  path.latent_factor = sample_into(stream, path.values);
  return path;
}

std::optional<double> GaussianModel::sample_into(Stream& stream,
                                                 std::span<double> out) const {
  if (out.size() != n_) throw InvalidParameter("output span must have length n");

  switch (spec_.family) {
    case CovarianceFamily::iid:
      for (double& v : out) v = stream.normal();
      return std::nullopt;

    case CovarianceFamily::one_factor: {
      const double xi = stream.normal();
      const double idio = std::sqrt(1.0 - rho_);
      const double common = std::sqrt(rho_) * xi;
      for (double& v : out) v = idio * stream.normal() + common;
      return xi;
    }

    case CovarianceFamily::log_decay:
      break;
  }

  if (dense_) {
    std::vector<double> z(n_);
    for (double& v : z) v = stream.normal();
    for (std::size_t i = 0; i < n_; ++i) {
      const double* row = dense_->lower.data() + i * n_;
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
      out[i] = acc;
    }
    return std::nullopt;
  }

  const Circulant& c = *circulant_;
  FftwBuffer in(c.size);
  FftwBuffer result(c.size);
  for (std::size_t j = 0; j < c.size; ++j) {
    in.data[j][0] = c.sqrt_scaled_eigen[j] * stream.normal();
    in.data[j][1] = c.sqrt_scaled_eigen[j] * stream.normal();
  }
  fftw_execute_dft(c.plan, in.data, result.data);
  for (std::size_t j = 0; j < n_; ++j) out[j] = result.data[j][0];
  return std::nullopt;
}

}  // namespace gmx
