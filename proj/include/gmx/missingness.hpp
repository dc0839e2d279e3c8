#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gmx/rng.hpp"

namespace gmx {

struct PointMass {
  double p = 1.0;
};

struct DiscreteLaw {
  std::vector<double> values;
  std::vector<double> weights;
};

struct UniformLaw {
  double a = 0.0;
  double b = 1.0;
};

struct BetaLaw {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Law of the limiting observed fraction lambda, supported in [0, 1].
class LambdaLaw {
 public:
  using Kind = std::variant<PointMass, DiscreteLaw, UniformLaw, BetaLaw>;

  /// Validates the law; throws InvalidParameter.
  explicit LambdaLaw(Kind kind);

  static LambdaLaw point(double p) { return LambdaLaw(PointMass{p}); }
  static LambdaLaw discrete(std::vector<double> values, std::vector<double> weights) {
    return LambdaLaw(DiscreteLaw{std::move(values), std::move(weights)});
  }
  static LambdaLaw uniform(double a, double b) { return LambdaLaw(UniformLaw{a, b}); }
  static LambdaLaw beta(double alpha, double beta) { return LambdaLaw(BetaLaw{alpha, beta}); }

  const Kind& kind() const noexcept { return kind_; }
  bool is_point() const noexcept { return std::holds_alternative<PointMass>(kind_); }

  double mean() const;
  double sample(Stream& stream) const;
  /// Law of 1 - lambda.
  LambdaLaw reflected() const;
  /// Compact label such as "point(0.5)" or "beta(2,2)".
  std::string describe() const;

 private:
  Kind kind_;
};

struct IidBernoulli {
  LambdaLaw lambda_law = LambdaLaw::point(1.0);
};

struct Exchangeable {
  LambdaLaw lambda_law = LambdaLaw::point(1.0);
};

struct Periodic {
  std::vector<std::uint8_t> pattern;
};

/// Generator of observation indicators eps_1..eps_n.
class MissingnessModel {
 public:
  using Kind = std::variant<IidBernoulli, Exchangeable, Periodic>;

  /// Throws InvalidParameter when iid_bernoulli carries a non-point law or a
  /// periodic pattern is empty / not 0-1.
  explicit MissingnessModel(Kind kind);

  static MissingnessModel iid_bernoulli(double p) {
    return MissingnessModel(IidBernoulli{LambdaLaw::point(p)});
  }
  static MissingnessModel exchangeable(LambdaLaw law) {
    return MissingnessModel(Exchangeable{std::move(law)});
  }
  /// Pattern given as a string of '0'/'1' characters.
  static MissingnessModel periodic(const std::string& pattern);

  const Kind& kind() const noexcept { return kind_; }
  bool is_deterministic() const noexcept;
  /// Law of the limit lambda implied by the model.
  LambdaLaw limit_law() const;
  std::string describe() const;

 private:
  Kind kind_;
};

struct IndicatorPath {
  std::vector<std::uint8_t> eps;
  double realized_lambda = 0.0;
};

IndicatorPath sample_indicators(const MissingnessModel& model, std::size_t n, Stream& stream);
/// Fills eps (size n) and returns the realized lambda.
double sample_indicators_into(const MissingnessModel& model, Stream& stream,
                              std::span<std::uint8_t> eps);

/// S_n / n.
double observed_fraction(std::span<const std::uint8_t> eps);
inline double observed_fraction(const IndicatorPath& path) { return observed_fraction(path.eps); }

}  // namespace gmx
