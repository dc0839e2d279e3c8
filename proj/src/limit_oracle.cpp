#include "gmx/limit_oracle.hpp"

#include <cmath>

#include "gmx/errors.hpp"

namespace gmx {

MixingDraw draw_mixing(const LimitLawParams& params, Stream& stream) {
  MixingDraw d;
  d.lambda = params.lambda_law.sample(stream);
  d.xi = stream.normal();
  return d;
}

LimitSample sample_limit_counts_given(const MixingDraw& mixing, double gamma, double mB,
                                      std::span<const double> levels, Stream& stream) {
  if (!(mB >= 0.0 && mB <= 1.0)) throw InvalidParameter("mB must lie in [0, 1]");
  if (levels.empty()) throw InvalidParameter("at least one level is required");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) throw InvalidParameter("levels must be strictly increasing");
  }
  LimitSample out;
  out.lambda = mixing.lambda;
  out.xi = mixing.xi;
  out.levels.assign(levels.begin(), levels.end());
  out.observed_counts.resize(levels.size());
  out.missed_counts.resize(levels.size());

  const double base = mB * g_intensity(gamma, levels.front(), mixing.xi);
  std::uint64_t obs = stream.poisson(mixing.lambda * base);
  std::uint64_t miss = stream.poisson((1.0 - mixing.lambda) * base);
  out.observed_counts[0] = obs;
  out.missed_counts[0] = miss;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double keep = std::exp(-(levels[i] - levels[i - 1]));
    obs = stream.binomial(obs, keep);
    miss = stream.binomial(miss, keep);
    out.observed_counts[i] = obs;
    out.missed_counts[i] = miss;
  }
  return out;
}

LimitSample sample_limit_counts(const LimitLawParams& params, double mB,
                                std::span<const double> levels, Stream& stream) {
  const MixingDraw mixing = draw_mixing(params, stream);
  return sample_limit_counts_given(mixing, params.gamma, mB, levels, stream);
}

LimitMaxima sample_limit_maxima_given(const MixingDraw& mixing, double gamma, Stream& stream) {
  const double shift = -gamma + std::sqrt(2.0 * gamma) * mixing.xi;
  const auto class_max = [&](double fraction) {
    if (!(fraction > 0.0)) return ExtendedReal::minus_infinity();
    const double gumbel = -std::log(stream.exponential());
    return ExtendedReal(std::log(fraction) + shift + gumbel);
  };
  LimitMaxima m;
  m.observed = class_max(mixing.lambda);
  m.missed = class_max(1.0 - mixing.lambda);
  const double u_obs = stream.uniform_open_closed();
  const double u_miss = stream.uniform_open_closed();
  if (!m.observed.is_minus_infinity()) m.observed_location = u_obs;
  if (!m.missed.is_minus_infinity()) m.missed_location = u_miss;
  if (m.observed > m.missed) {
    m.overall = m.observed;
    m.overall_location = m.observed_location;
  } else {
    m.overall = m.missed;
    m.overall_location = m.missed_location;
  }
  return m;
}

LimitSample sample_limit_maxima_locations(const LimitLawParams& params, Stream& stream) {
  const MixingDraw mixing = draw_mixing(params, stream);
  LimitSample out;
  out.lambda = mixing.lambda;
  out.xi = mixing.xi;
  out.maxima = sample_limit_maxima_given(mixing, params.gamma, stream);
  return out;
}

}  // namespace gmx
