#include "gmx/limit_laws.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>

#include "gmx/errors.hpp"

namespace gmx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<QuadratureRule> lambda_ladder(const LambdaLaw& law, const QuadratureOptions& options) {
  return std::visit(
      Overloaded{
          [](const PointMass& k) {
            return std::vector<QuadratureRule>{QuadratureRule{{k.p}, {1.0}}};
          },
          [](const DiscreteLaw& k) {
            return std::vector<QuadratureRule>{QuadratureRule{k.values, k.weights}};
          },
          [&](const UniformLaw& k) {
            std::vector<QuadratureRule> rules;
            for (std::size_t n : node_ladder(options)) rules.push_back(gauss_legendre(n, k.a, k.b));
            return rules;
          },
          [&](const BetaLaw& k) {
            std::vector<QuadratureRule> rules;
            for (std::size_t n : node_ladder(options)) {
              rules.push_back(gauss_jacobi_beta(n, k.alpha, k.beta));
            }
            return rules;
          },
      },
      law.kind());
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

// exp(-a) for a >= 0 that tolerates a = +inf.
double exp_neg(double a) { return a == std::numeric_limits<double>::infinity() ? 0.0 : std::exp(-a); }

// Conditional P(N~^x <= k-1, N~^y + N^^y <= m-1 | lambda, z) for the
// observed class with observed fraction lam, as printed for x < y and
// x >= y.
double obs_vs_all_kernel(double lam, double gx, double gy, bool x_below_y, std::size_t k,
                         std::size_t m) {
  double total = 0.0;
  const double miss_y = (1.0 - lam) * gy;
  for (std::size_t t = 0; t < m; ++t) {
    const double log_t = log_power_over_factorial(miss_y, t);
    if (log_t == kNegInf) continue;
    for (std::size_t i = 0; i + t < m; ++i) {
      if (x_below_y) {
        const double log_i = log_power_over_factorial(lam * gy, i);
        if (log_i == kNegInf) continue;
        for (std::size_t j = i; j < k; ++j) {
          const double log_j = log_power_over_factorial(lam * (gx - gy), j - i);
          if (log_j == kNegInf) continue;
          total += std::exp(log_t - miss_y + log_i + log_j - lam * gx);
        }
      } else {
        const std::size_t j_max = std::min(i, k - 1);
        for (std::size_t j = 0; j <= j_max; ++j) {
          const double log_j = log_power_over_factorial(lam * gx, j);
          const double log_ij = log_power_over_factorial(lam * (gy - gx), i - j);
          if (log_j == kNegInf || log_ij == kNegInf) continue;
          total += std::exp(log_t - gy + log_j + log_ij);
        }
      }
    }
  }
  return total;
}

}  // namespace

double log_factorial(std::uint64_t p) noexcept {
  constexpr std::size_t kTable = 4096;
  static const std::array<double, kTable> table = [] {
    std::array<double, kTable> t{};
    t[0] = 0.0;
    for (std::size_t i = 1; i < kTable; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (p < kTable) return table[p];
  // Stirling series; relative error far below double precision at p >= 4096.
  const double x = static_cast<double>(p);
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return (x + 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

double log_power_over_factorial(double a, std::uint64_t p) noexcept {
  if (p == 0) return 0.0;
  if (!(a > 0.0)) return kNegInf;
  return static_cast<double>(p) * std::log(a) - log_factorial(p);
}

double poisson_pmf(std::uint64_t s, double mean) noexcept {
  const double lp = log_power_over_factorial(mean, s);
  if (lp == kNegInf) return 0.0;
  return std::exp(lp - mean);
}

const char* to_string(LocationPair p) noexcept {
  switch (p) {
    case LocationPair::obs_missed:
      return "obs_missed";
    case LocationPair::obs_all:
      return "obs_all";
    case LocationPair::missed_all:
      return "missed_all";
  }
  return "?";
}

LimitLaws::LimitLaws(LimitLawParams params, QuadratureOptions options)
    : params_(std::move(params)),
      z_(params_.gamma, options),
      lambda_rules_(lambda_ladder(params_.lambda_law, options)) {
  if (!(params_.gamma >= 0.0) || !std::isfinite(params_.gamma)) {
    throw InvalidParameter("gamma must be finite and >= 0");
  }
}

double LimitLaws::joint_maxima_cdf(double x, double y) const {
  return order_stats_obs_missed_cdf(1, 1, x, y);
}

double LimitLaws::order_stats_obs_missed_cdf(std::size_t k, std::size_t l, double x,
                                             double y) const {
  if (k == 0 || l == 0) throw InvalidParameter("order statistic ranks must be >= 1");
  const double gamma = params_.gamma;
  return clamp_probability(expectation([&](double lam, double z) {
    const double obs_mean = lam * g_intensity(gamma, x, z);
    const double miss_mean = (1.0 - lam) * g_intensity(gamma, y, z);
    double obs = 0.0;
    for (std::size_t s = 0; s < k; ++s) obs += poisson_pmf(s, obs_mean);
    double miss = 0.0;
    for (std::size_t t = 0; t < l; ++t) miss += poisson_pmf(t, miss_mean);
    return obs * miss;
  }));
}

double LimitLaws::order_stats_vs_all_cdf(ObsClass cls, std::size_t k, std::size_t m, double x,
                                         double y) const {
  if (k == 0 || m == 0) throw InvalidParameter("order statistic ranks must be >= 1");
  if (cls == ObsClass::all) throw InvalidParameter("class must be observed or missed");
  const double gamma = params_.gamma;
  const bool missed = cls == ObsClass::missed;
  const bool x_below_y = x < y;
  return clamp_probability(expectation([&](double lam, double z) {
    const double frac = missed ? 1.0 - lam : lam;
    return obs_vs_all_kernel(frac, g_intensity(gamma, x, z), g_intensity(gamma, y, z), x_below_y,
                             k, m);
  }));
}

double LimitLaws::joint_counts_pmf(double mB, double x, double y, std::uint64_t k1,
                                   std::uint64_t k2, std::uint64_t k3, std::uint64_t k4) const {
  if (!(mB > 0.0 && mB <= 1.0)) throw InvalidParameter("m(B) must lie in (0, 1]");
  const bool x_above_y = x > y;
  if (x_above_y ? (k1 > k3 || k2 > k4) : (k1 < k3 || k2 < k4)) return 0.0;
  const double gamma = params_.gamma;
  return clamp_probability(expectation([&](double lam, double z) {
    const double gx = mB * g_intensity(gamma, x, z);
    const double gy = mB * g_intensity(gamma, y, z);
    const double obs = lam;
    const double miss = 1.0 - lam;
    double log_term = 0.0;
    if (x_above_y) {
      log_term = log_power_over_factorial(obs * gx, k1) +
                 log_power_over_factorial(obs * (gy - gx), k3 - k1) - obs * gy +
                 log_power_over_factorial(miss * gx, k2) +
                 log_power_over_factorial(miss * (gy - gx), k4 - k2) - miss * gy;
    } else {
      log_term = log_power_over_factorial(obs * gy, k3) +
                 log_power_over_factorial(obs * (gx - gy), k1 - k3) - obs * gx +
                 log_power_over_factorial(miss * gy, k4) +
                 log_power_over_factorial(miss * (gx - gy), k2 - k4) - miss * gx;
    }
    return log_term == kNegInf ? 0.0 : std::exp(log_term);
  }));
}

double LimitLaws::void_probability_intervals(std::span<const VoidCell> cells) const {
  double total_weight = 0.0;
  for (const VoidCell& c : cells) {
    if (!(c.weight > 0.0)) throw InvalidParameter("void cell weights must be > 0");
    total_weight += c.weight;
  }
  if (total_weight > 1.0 + 1e-12) throw InvalidParameter("void cell weights must sum to <= 1");
  const double gamma = params_.gamma;
  return clamp_probability(expectation([&](double lam, double z) {
    double exponent = 0.0;
    for (const VoidCell& c : cells) {
      exponent += c.weight * (lam * g_intensity(gamma, c.x, z) +
                              (1.0 - lam) * g_intensity(gamma, c.y, z));
    }
    return exp_neg(exponent);
  }));
}

double LimitLaws::locations_heights_cdf(LocationPair pair, double s, double t, double x,
                                        double y) const {
  if (!(s > 0.0 && s <= 1.0 && t > 0.0 && t <= 1.0)) {
    throw InvalidParameter("location arguments must lie in (0, 1]");
  }
  const double gamma = params_.gamma;
  if (pair == LocationPair::obs_missed) {
    return clamp_probability(s * t * expectation([&](double lam, double z) {
                               return std::exp(-lam * g_intensity(gamma, x, z)) *
                                      std::exp(-(1.0 - lam) * g_intensity(gamma, y, z));
                             }));
  }
  if (x > y) {
    throw InvalidParameter("locations_heights_cdf for obs_all / missed_all requires x <= y");
  }
  const bool missed = pair == LocationPair::missed_all;
  const double both_term = expectation([&](double lam, double z) {
    const double frac = missed ? 1.0 - lam : lam;
    const double gx = g_intensity(gamma, x, z);
    return std::exp(-frac * gx) * std::exp(-(1.0 - frac) * g_intensity(gamma, y, z)) -
           frac * std::exp(-gx);
  });
  const double wins_term = expectation([&](double lam, double z) {
    const double frac = missed ? 1.0 - lam : lam;
    return frac * std::exp(-g_intensity(gamma, x, z));
  });
  return clamp_probability(s * t * both_term + std::min(s, t) * wins_term);
}

double locations_cdf(const LambdaLaw& law, LocationPair pair, double s, double t) {
  if (!(s > 0.0 && s <= 1.0 && t > 0.0 && t <= 1.0)) {
    throw InvalidParameter("location arguments must lie in (0, 1]");
  }
  const double mean = law.mean();
  switch (pair) {
    case LocationPair::obs_missed:
      return s * t;
    case LocationPair::obs_all:
      return s * t * (1.0 - mean) + std::min(s, t) * mean;
    case LocationPair::missed_all:
      return s * t * mean + std::min(s, t) * (1.0 - mean);
  }
  return 0.0;
}

double log_normal_cdf(double u) noexcept {
  if (u == std::numeric_limits<double>::infinity()) return 0.0;
  if (u > 0.0) return std::log1p(-0.5 * std::erfc(u / std::numbers::sqrt2));
  return std::log(0.5 * std::erfc(-u / std::numbers::sqrt2));
}

double finite_n_one_factor_prob(std::size_t n, double gamma, std::span<const FiniteNCell> cells,
                                QuadratureOptions options) {
  std::size_t used = 0;
  for (const FiniteNCell& c : cells) used += c.n_obs + c.n_miss;
  if (used > n) throw InvalidParameter("cell counts exceed n");
  // Validates n >= 3 and 0 <= gamma < ln n.
  (void)transformed_level(n, 0.0, 0.0, gamma);
  const LevelParams lp = LevelParams::make(n);
  const double rho = gamma / std::log(static_cast<double>(n));
  const double sqrt_rho = std::sqrt(rho);
  const double inv_sqrt_1m_rho = 1.0 / std::sqrt(1.0 - rho);
  const NormalQuadrature quad(gamma, options);
  const double value = quad.integrate([&](double z) {
    double log_p = 0.0;
    for (const FiniteNCell& c : cells) {
      if (c.n_obs > 0) {
        log_p += static_cast<double>(c.n_obs) *
                 log_normal_cdf((lp.level(c.x) - sqrt_rho * z) * inv_sqrt_1m_rho);
      }
      if (c.n_miss > 0) {
        log_p += static_cast<double>(c.n_miss) *
                 log_normal_cdf((lp.level(c.y) - sqrt_rho * z) * inv_sqrt_1m_rho);
      }
    }
    return std::exp(log_p);
  });
  return clamp_probability(value);
}

}  // namespace gmx
