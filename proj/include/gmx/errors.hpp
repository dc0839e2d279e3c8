#pragma once

#include <stdexcept>
#include <string>

namespace gmx {

/// A parameter violates an operation's precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// Circulant embedding produced an eigenvalue below -tol_clip.
class NonEmbeddableCovariance : public std::runtime_error {
 public:
  explicit NonEmbeddableCovariance(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature failed to converge within the node budget.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Experiment configuration failed validation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gmx
