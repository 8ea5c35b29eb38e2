#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cournot {

/// Per-edge coefficients of a cost that splits into independent
/// one-dimensional terms: c(s) = sum_e (lambda_e s_e^2 / 2 + mu_e s_e).
struct SeparableTerms {
  std::vector<double> lambda;
  std::vector<double> mu;
};

/// Production cost c_j(s_j) of one firm, where s_j lists the firm's
/// quantities on its incident edges in canonical (market-ascending) order.
class CostFunction {
 public:
  /// c(s) = lambda (sum_e s_e)^2 / 2
  struct QuadraticTotal {
    double lambda;
  };
  /// c(s) = sum_e (lambda_e s_e^2 / 2 + mu_e s_e)
  struct SeparableQuadratic {
    std::vector<double> lambda;
    std::vector<double> mu;
  };
  /// c(s) = s^T A s / 2 + b^T s; A is stored symmetrized.
  struct QuadraticForm {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
  };

  using Params = std::variant<QuadraticTotal, SeparableQuadratic, QuadraticForm>;

  static CostFunction quadratic_total(double lambda) { return CostFunction(QuadraticTotal{lambda}); }
  static CostFunction separable_quadratic(std::vector<double> lambda, std::vector<double> mu) {
    return CostFunction(SeparableQuadratic{std::move(lambda), std::move(mu)});
  }
  static CostFunction quadratic_form(Eigen::MatrixXd A, Eigen::VectorXd b) {
    return CostFunction(QuadraticForm{std::move(A), std::move(b)});
  }

  explicit CostFunction(Params params);

  const Params& params() const noexcept { return params_; }
  std::string kind() const;

  /// Strategy dimension this cost is tied to, if the family fixes one.
  std::optional<std::size_t> fixed_dimension() const;

  double value(const Eigen::VectorXd& s) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& s) const;
  Eigen::MatrixXd hessian(std::size_t dim) const;

  /// Checks the dimension against the firm's degree and convexity on the
  /// nonnegative orthant. Throws ShapeMismatch or NonConvexCost.
  void validate(std::size_t dim) const;

  /// Per-edge terms when the cost has no cross-edge coupling.
  std::optional<SeparableTerms> separable_terms(std::size_t dim) const;

 private:
  Params params_;
};

}  // namespace cournot
