#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gmx/extremes.hpp"
#include "gmx/missingness.hpp"
#include "gmx/quadrature.hpp"

namespace gmx {

struct LimitLawParams {
  double gamma = 0.0;
  LambdaLaw lambda_law = LambdaLaw::point(1.0);
};

/// ln g(x, z) = -x - gamma + sqrt(2 gamma) z. x = +inf gives -inf.
inline double log_g_intensity(double gamma, double x, double z) noexcept {
  return -x - gamma + std::sqrt(2.0 * gamma) * z;
}

/// g(x, z) = exp(-x - gamma + sqrt(2 gamma) z); may underflow to 0 or be
/// +inf for extreme arguments.
inline double g_intensity(double gamma, double x, double z) noexcept {
  return std::exp(log_g_intensity(gamma, x, z));
}

/// ln(a^p / p!), with 0^0 = 1 and -inf for a = 0 < p.
double log_power_over_factorial(double a, std::uint64_t p) noexcept;
double log_factorial(std::uint64_t p) noexcept;
/// Poisson(mean) pmf at s, mean >= 0.
double poisson_pmf(std::uint64_t s, double mean) noexcept;

enum class LocationPair { obs_missed, obs_all, missed_all };

const char* to_string(LocationPair p) noexcept;

/// One cell of a product-form void probability: measure w, observed level x,
/// missed level y (+inf drops a factor).
struct VoidCell {
  double weight = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// One cell of the exact finite-n one-factor probability: n_obs observed
/// values all <= u_n(x) and n_miss missed values all <= u_n(y).
struct FiniteNCell {
  std::size_t n_obs = 0;
  std::size_t n_miss = 0;
  double x = 0.0;
  double y = 0.0;
};

/// Closed-form limit laws E int f(lambda, z) dPhi(z), evaluated by
/// quadrature over the latent normal z and the lambda law.
///
/// Each value is computed on the base rule and then on doubled z rules
/// until two successive values agree within options.tolerance; the lambda
/// rule is then doubled the same way. Exhausting max_nodes in either
/// dimension throws QuadratureError. Level arguments accept +inf.
class LimitLaws {
 public:
  explicit LimitLaws(LimitLawParams params, QuadratureOptions options = {});

  const LimitLawParams& params() const noexcept { return params_; }
  double gamma() const noexcept { return params_.gamma; }

  /// E int f(lambda, z) dPhi(z).
  template <class F>
  double expectation(F&& f) const {
    const auto eval = [&](std::size_t zi, std::size_t li) {
      const QuadratureRule& lambda_rule = lambda_rules_[li];
      const QuadratureRule& z_rule = z_.rules()[zi];
      double acc = 0.0;
      for (std::size_t a = 0; a < lambda_rule.size(); ++a) {
        const double lambda = lambda_rule.nodes[a];
        double inner = 0.0;
        for (std::size_t b = 0; b < z_rule.size(); ++b) {
          inner += z_rule.weights[b] * f(lambda, z_rule.nodes[b]);
        }
        acc += lambda_rule.weights[a] * inner;
      }
      return acc;
    };
    const double tol = z_.options().tolerance;
    std::size_t zi = 0;
    double value = eval(0, 0);
    value = converge_on_ladder(
        z_.rules().size(), 0, value, tol, [&](std::size_t i) { return eval(i, 0); }, &zi,
        "latent-normal quadrature");
    if (lambda_rules_.size() > 1) {
      value = converge_on_ladder(
          lambda_rules_.size(), 0, value, tol, [&](std::size_t i) { return eval(zi, i); },
          nullptr, "lambda-law quadrature");
    }
    return value;
  }

  /// lim P(M~_n <= u_n(x), M^_n <= u_n(y)) = E int exp(-lambda g(x,z) - (1-lambda) g(y,z)) dPhi.
  double joint_maxima_cdf(double x, double y) const;

  /// Joint limit of the k-th observed and l-th missed maxima.
  double order_stats_obs_missed_cdf(std::size_t k, std::size_t l, double x, double y) const;

  /// Joint limit P(M_class^(k) <= u_n(x), M_n^(m) <= u_n(y)) for class
  /// observed or missed. Piecewise in x < y and x >= y.
  double order_stats_vs_all_cdf(ObsClass cls, std::size_t k, std::size_t m, double x,
                                double y) const;

  /// P(N~^x(B) = k1, N^^x(B) = k2, N~^y(B) = k3, N^^y(B) = k4) with m(B) = mB;
  /// exactly 0 for count patterns that violate level nesting.
  double joint_counts_pmf(double mB, double x, double y, std::uint64_t k1, std::uint64_t k2,
                          std::uint64_t k3, std::uint64_t k4) const;

  /// E int prod_i exp[-w_i (lambda g(x_i, z) + (1 - lambda) g(y_i, z))] dPhi(z).
  double void_probability_intervals(std::span<const VoidCell> cells) const;

  /// Joint limit of scaled locations and heights of class maxima. The
  /// obs_all and missed_all pairs require x <= y.
  double locations_heights_cdf(LocationPair pair, double s, double t, double x, double y) const;

 private:
  LimitLawParams params_;
  NormalQuadrature z_;
  std::vector<QuadratureRule> lambda_rules_;
};

/// Limit law of scaled locations only.
double locations_cdf(const LambdaLaw& law, LocationPair pair, double s, double t);

/// Exact finite-n probability for the one-factor comparison model with a
/// fixed indicator pattern: int prod_i Phi(u_n(x_i,z))^{n_obs_i}
/// Phi(u_n(y_i,z))^{n_miss_i} dPhi(z).
double finite_n_one_factor_prob(std::size_t n, double gamma, std::span<const FiniteNCell> cells,
                                QuadratureOptions options = {});

/// ln Phi(u), accurate in both tails.
double log_normal_cdf(double u) noexcept;

}  // namespace gmx
