#include "gmx/quadrature.hpp"

#include <algorithm>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace gmx {

namespace {

// Orthonormal polynomial values p_0..p_{n-1} at x and p_n, p_n'.
struct PolyEval {
  double sum_squares = 0.0;  // sum_{k<n} p_k(x)^2
  double p_n = 0.0;
  double dp_n = 0.0;
};

PolyEval evaluate_orthonormal(double x, std::span<const double> alpha,
                              std::span<const double> beta) {
  const std::size_t n = alpha.size();
  PolyEval out;
  double p_prev = 0.0;
  double p = 1.0;
  double dp_prev = 0.0;
  double dp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out.sum_squares += p * p;
    if (!std::isfinite(out.sum_squares)) break;
    const double sb_k = k == 0 ? 0.0 : std::sqrt(beta[k]);
    const double sb_next = std::sqrt(beta[k + 1]);
    const double p_next = ((x - alpha[k]) * p - sb_k * p_prev) / sb_next;
    const double dp_next = ((x - alpha[k]) * dp + p - sb_k * dp_prev) / sb_next;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  out.p_n = p;
  out.dp_n = dp;
  return out;
}

}  // namespace

QuadratureRule gauss_from_recurrence(std::span<const double> alpha, std::span<const double> beta) {
  const std::size_t n = alpha.size();
  if (n == 0 || beta.size() != n + 1) {
    throw InvalidParameter("recurrence needs alpha[0..n-1] and beta[0..n]");
  }
  QuadratureRule rule;
  if (n == 1) {
    rule.nodes = {alpha[0]};
    rule.weights = {1.0};
    return rule;
  }
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (std::size_t k = 0; k < n; ++k) diag(static_cast<Eigen::Index>(k)) = alpha[k];
  for (std::size_t k = 1; k < n; ++k) sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(beta[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw QuadratureError("tridiagonal eigensolver failed");

  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    for (int iter = 0; iter < 2; ++iter) {
      const PolyEval pe = evaluate_orthonormal(x, alpha, beta);
      if (!std::isfinite(pe.p_n) || !std::isfinite(pe.dp_n) || pe.dp_n == 0.0) break;
      const double step = pe.p_n / pe.dp_n;
      if (!std::isfinite(step)) break;
      x -= step;
    }
    const PolyEval pe = evaluate_orthonormal(x, alpha, beta);
    rule.nodes[i] = x;
    rule.weights[i] = std::isfinite(pe.sum_squares) ? 1.0 / pe.sum_squares : 0.0;
  }
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

QuadratureRule gauss_hermite_normal(std::size_t n) {
  std::vector<double> alpha(n, 0.0);
  std::vector<double> beta(n + 1);
  beta[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) beta[k] = static_cast<double>(k);
  return gauss_from_recurrence(alpha, beta);
}

namespace {

// Jacobi recurrence on [-1, 1] for weight (1 - x)^a (1 + x)^b.
void jacobi_recurrence(std::size_t n, double a, double b, std::vector<double>& alpha,
                       std::vector<double>& beta) {
  alpha.assign(n, 0.0);
  beta.assign(n + 1, 0.0);
  beta[0] = 1.0;
  alpha[0] = (b - a) / (a + b + 2.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double s = 2.0 * static_cast<double>(k) + a + b;
    alpha[k] = (b * b - a * a) / (s * (s + 2.0));
  }
  if (n >= 1) beta[1] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    beta[k] = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0) * (s - 1.0));
  }
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  std::vector<double> alpha;
  std::vector<double> beta;
  jacobi_recurrence(n, 0.0, 0.0, alpha, beta);
  QuadratureRule rule = gauss_from_recurrence(alpha, beta);
  for (double& x : rule.nodes) x = a + 0.5 * (b - a) * (x + 1.0);
  return rule;
}

QuadratureRule gauss_jacobi_beta(std::size_t n, double alpha_law, double beta_law) {
  std::vector<double> alpha;
  std::vector<double> beta;
  // Beta(alpha, beta) on [0, 1] maps to Jacobi (a, b) = (beta - 1, alpha - 1).
  jacobi_recurrence(n, beta_law - 1.0, alpha_law - 1.0, alpha, beta);
  QuadratureRule rule = gauss_from_recurrence(alpha, beta);
  for (double& x : rule.nodes) x = 0.5 * (x + 1.0);
  return rule;
}

QuadratureRule composite_normal(std::size_t n, double half_width, std::size_t panel_nodes) {
  if (panel_nodes == 0 || n % panel_nodes != 0 || n == 0) {
    throw InvalidParameter("composite rule size must be a positive multiple of the panel size");
  }
  const QuadratureRule panel = gauss_legendre(panel_nodes, -1.0, 1.0);
  const std::size_t panels = n / panel_nodes;
  const double width = 2.0 * half_width / static_cast<double>(panels);
  QuadratureRule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = -half_width + width * static_cast<double>(p);
    for (std::size_t i = 0; i < panel_nodes; ++i) {
      const double z = lo + 0.5 * width * (panel.nodes[i] + 1.0);
      const double w = width * panel.weights[i] * inv_sqrt_2pi * std::exp(-0.5 * z * z);
      rule.nodes.push_back(z);
      rule.weights.push_back(w);
      total += w;
    }
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

std::vector<std::size_t> node_ladder(const QuadratureOptions& options) {
  if (options.base_nodes == 0 || options.max_nodes < options.base_nodes) {
    throw InvalidParameter("quadrature ladder needs 0 < base_nodes <= max_nodes");
  }
  std::vector<std::size_t> ladder;
  for (std::size_t n = options.base_nodes; n <= options.max_nodes; n *= 2) ladder.push_back(n);
  return ladder;
}

NormalQuadrature::NormalQuadrature(double gamma, QuadratureOptions options) : options_(options) {
  const double half_width = 12.0 + std::sqrt(2.0 * std::max(gamma, 0.0));
  for (std::size_t n : node_ladder(options_)) rules_.push_back(composite_normal(n, half_width));
}

}  // namespace gmx
