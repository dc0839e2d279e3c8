#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gmx/errors.hpp"

namespace gmx {

/// Nodes and positive weights for an expectation under a probability
/// measure; weights are normalized to sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Gauss rule for the probability measure with three-term recurrence
/// coefficients alpha[0..n-1], beta[0..n] (beta[0] unused), computed by the
/// Golub-Welsch eigenvalue method with Newton-polished nodes and
/// Christoffel-function weights.
QuadratureRule gauss_from_recurrence(std::span<const double> alpha, std::span<const double> beta);

/// Gauss-Hermite rule for expectations under N(0, 1).
QuadratureRule gauss_hermite_normal(std::size_t n);
/// Gauss-Legendre rule for expectations under Uniform(a, b).
QuadratureRule gauss_legendre(std::size_t n, double a, double b);
/// Gauss-Jacobi rule for expectations under Beta(alpha, beta) on [0, 1].
QuadratureRule gauss_jacobi_beta(std::size_t n, double alpha, double beta);

/// n-node rule for expectations under N(0, 1): Gauss-Legendre panels with
/// panel_nodes nodes each on [-half_width, half_width], weighted by the
/// standard normal density. n must be a multiple of panel_nodes.
QuadratureRule composite_normal(std::size_t n, double half_width, std::size_t panel_nodes = 16);

struct QuadratureOptions {
  std::size_t base_nodes = 64;
  std::size_t max_nodes = 512;
  double tolerance = 1e-10;
};

/// Ladder of node counts base, 2 base, ..., max.
std::vector<std::size_t> node_ladder(const QuadratureOptions& options);

/// Escalate through a ladder: evaluate(i) is the value at rung i. Returns the
/// first value whose change from the previous rung is below tolerance;
/// throws QuadratureError when the ladder is exhausted.
template <class Eval>
double converge_on_ladder(std::size_t rungs, std::size_t start, double start_value,
                          double tolerance, Eval&& evaluate, std::size_t* converged_rung,
                          const char* what) {
  double previous = start_value;
  for (std::size_t i = start + 1; i < rungs; ++i) {
    const double current = evaluate(i);
    if (std::abs(current - previous) < tolerance) {
      if (converged_rung != nullptr) *converged_rung = i;
      return current;
    }
    previous = current;
  }
  throw QuadratureError(std::string(what) +
                        ": node doubling did not converge within the node budget");
}

/// Escalating quadrature over the standard normal latent variable.
class NormalQuadrature {
 public:
  /// half_width = 12 + sqrt(2 gamma) covers the mass of g(x, z) dPhi(z).
  explicit NormalQuadrature(double gamma, QuadratureOptions options = {});

  template <class F>
  double integrate(F&& f) const {
    const double base = rules_.front().integrate(f);
    if (rules_.size() == 1) return base;
    return converge_on_ladder(
        rules_.size(), 0, base, options_.tolerance,
        [&](std::size_t i) { return rules_[i].integrate(f); }, nullptr, "normal quadrature");
  }

  const std::vector<QuadratureRule>& rules() const noexcept { return rules_; }
  const QuadratureOptions& options() const noexcept { return options_; }

 private:
  QuadratureOptions options_;
  std::vector<QuadratureRule> rules_;
};

}  // namespace gmx
