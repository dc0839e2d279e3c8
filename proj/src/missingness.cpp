#include "gmx/missingness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gmx/errors.hpp"

namespace gmx {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

LambdaLaw::LambdaLaw(Kind kind) : kind_(std::move(kind)) {
  std::visit(
      Overloaded{
          [](const PointMass& k) {
            if (!in_unit(k.p)) throw InvalidParameter("point mass must lie in [0, 1]");
          },
          [](const DiscreteLaw& k) {
            if (k.values.empty() || k.values.size() != k.weights.size()) {
              throw InvalidParameter("discrete law needs matching nonempty values and weights");
            }
            double total = 0.0;
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              if (!in_unit(k.values[i])) throw InvalidParameter("discrete support must lie in [0, 1]");
              if (!(k.weights[i] >= 0.0)) throw InvalidParameter("discrete weights must be >= 0");
              total += k.weights[i];
            }
            if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("discrete weights must sum to 1");
          },
          [](const UniformLaw& k) {
            if (!(0.0 <= k.a && k.a < k.b && k.b <= 1.0)) {
              throw InvalidParameter("uniform law requires 0 <= a < b <= 1");
            }
          },
          [](const BetaLaw& k) {
            if (!(k.alpha > 0.0 && k.beta > 0.0) || !std::isfinite(k.alpha) ||
                !std::isfinite(k.beta)) {
              throw InvalidParameter("beta law requires alpha, beta > 0");
            }
          },
      },
      kind_);
}

double LambdaLaw::mean() const {
  return std::visit(
      Overloaded{
          [](const PointMass& k) { return k.p; },
          [](const DiscreteLaw& k) {
            double m = 0.0;
            for (std::size_t i = 0; i < k.values.size(); ++i) m += k.values[i] * k.weights[i];
            return m;
          },
          [](const UniformLaw& k) { return 0.5 * (k.a + k.b); },
          [](const BetaLaw& k) { return k.alpha / (k.alpha + k.beta); },
      },
      kind_);
}

double LambdaLaw::sample(Stream& stream) const {
  return std::visit(
      Overloaded{
          [](const PointMass& k) { return k.p; },
          [&stream](const DiscreteLaw& k) {
            const double u = stream.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < k.values.size(); ++i) {
              acc += k.weights[i];
              if (u < acc) return k.values[i];
            }
            return k.values.back();
          },
          [&stream](const UniformLaw& k) { return k.a + (k.b - k.a) * stream.uniform(); },
          [&stream](const BetaLaw& k) { return stream.beta(k.alpha, k.beta); },
      },
      kind_);
}

LambdaLaw LambdaLaw::reflected() const {
  return std::visit(
      Overloaded{
          [](const PointMass& k) { return LambdaLaw::point(1.0 - k.p); },
          [](const DiscreteLaw& k) {
            std::vector<double> values(k.values.size());
            std::transform(k.values.begin(), k.values.end(), values.begin(),
                           [](double v) { return 1.0 - v; });
            return LambdaLaw::discrete(std::move(values), k.weights);
          },
          [](const UniformLaw& k) { return LambdaLaw::uniform(1.0 - k.b, 1.0 - k.a); },
          [](const BetaLaw& k) { return LambdaLaw::beta(k.beta, k.alpha); },
      },
      kind_);
}

std::string LambdaLaw::describe() const {
  return std::visit(
      Overloaded{
          [](const PointMass& k) { return "point(" + fmt(k.p) + ")"; },
          [](const DiscreteLaw& k) {
            std::string s = "discrete(";
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              if (i > 0) s += ";";
              s += fmt(k.values[i]) + ":" + fmt(k.weights[i]);
            }
            return s + ")";
          },
          [](const UniformLaw& k) { return "uniform(" + fmt(k.a) + "," + fmt(k.b) + ")"; },
          [](const BetaLaw& k) { return "beta(" + fmt(k.alpha) + "," + fmt(k.beta) + ")"; },
      },
      kind_);
}

MissingnessModel::MissingnessModel(Kind kind) : kind_(std::move(kind)) {
  if (const auto* iid = std::get_if<IidBernoulli>(&kind_)) {
    if (!iid->lambda_law.is_point()) {
      throw InvalidParameter("iid_bernoulli requires a point-mass lambda law");
    }
  } else if (const auto* per = std::get_if<Periodic>(&kind_)) {
    if (per->pattern.empty()) throw InvalidParameter("periodic pattern must be nonempty");
    for (auto bit : per->pattern) {
      if (bit > 1) throw InvalidParameter("periodic pattern must be a 0/1 word");
    }
  }
}

MissingnessModel MissingnessModel::periodic(const std::string& pattern) {
  Periodic p;
  p.pattern.reserve(pattern.size());
  for (char c : pattern) {
    if (c != '0' && c != '1') throw InvalidParameter("periodic pattern must be a 0/1 word");
    p.pattern.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return MissingnessModel(std::move(p));
}

bool MissingnessModel::is_deterministic() const noexcept {
  if (std::holds_alternative<Periodic>(kind_)) return true;
  if (const auto* iid = std::get_if<IidBernoulli>(&kind_)) {
    const double p = std::get<PointMass>(iid->lambda_law.kind()).p;
    return p == 0.0 || p == 1.0;
  }
  return false;
}

LambdaLaw MissingnessModel::limit_law() const {
  return std::visit(
      Overloaded{
          [](const IidBernoulli& k) { return k.lambda_law; },
          [](const Exchangeable& k) { return k.lambda_law; },
          [](const Periodic& k) {
            const double ones = std::accumulate(k.pattern.begin(), k.pattern.end(), 0.0);
            return LambdaLaw::point(ones / static_cast<double>(k.pattern.size()));
          },
      },
      kind_);
}

std::string MissingnessModel::describe() const {
  return std::visit(
      Overloaded{
          [](const IidBernoulli& k) { return "iid_bernoulli:" + k.lambda_law.describe(); },
          [](const Exchangeable& k) { return "exchangeable:" + k.lambda_law.describe(); },
          [](const Periodic& k) {
            std::string s = "periodic:";
            for (auto b : k.pattern) s += static_cast<char>('0' + b);
            return s;
          },
      },
      kind_);
}

double sample_indicators_into(const MissingnessModel& model, Stream& stream,
                              std::span<std::uint8_t> eps) {
  const auto fill_bernoulli = [&](double p) {
    if (p >= 1.0) {
      std::fill(eps.begin(), eps.end(), std::uint8_t{1});
    } else if (p <= 0.0) {
      std::fill(eps.begin(), eps.end(), std::uint8_t{0});
    } else {
      for (auto& e : eps) e = stream.bernoulli(p) ? 1 : 0;
    }
  };
  return std::visit(
      Overloaded{
          [&](const IidBernoulli& k) {
            const double p = std::get<PointMass>(k.lambda_law.kind()).p;
            fill_bernoulli(p);
            return p;
          },
          [&](const Exchangeable& k) {
            const double lambda = k.lambda_law.sample(stream);
            fill_bernoulli(lambda);
            return lambda;
          },
          [&](const Periodic& k) {
            const std::size_t period = k.pattern.size();
            for (std::size_t j = 0; j < eps.size(); ++j) eps[j] = k.pattern[j % period];
            const double ones = std::accumulate(k.pattern.begin(), k.pattern.end(), 0.0);
            return ones / static_cast<double>(period);
          },
      },
      model.kind());
}

IndicatorPath sample_indicators(const MissingnessModel& model, std::size_t n, Stream& stream) {
  if (n == 0) throw InvalidParameter("indicator path length must be >= 1");
  IndicatorPath path;
  path.eps.resize(n);
  path.realized_lambda = sample_indicators_into(model, stream, path.eps);
  return path;
}

double observed_fraction(std::span<const std::uint8_t> eps) {
  if (eps.empty()) return 0.0;
  std::size_t ones = 0;
  for (auto e : eps) ones += e;
  return static_cast<double>(ones) / static_cast<double>(eps.size());
}

}  // namespace gmx
