#pragma once

#include <string>
#include <variant>

namespace cournot {

/// Inverse demand function P(D) of a single market.
///
/// Every family is decreasing and concave on D >= 0 for admissible
/// parameters and carries exact first and second derivatives.
class PriceFunction {
 public:
  /// P(D) = alpha - beta D
  struct Linear {
    double alpha;
    double beta;
  };
  /// P(D) = a - b D - c D^2
  struct Quadratic {
    double a;
    double b;
    double c;
  };
  /// P(D) = a - b D - c D^2 - d D^3
  struct Cubic {
    double a;
    double b;
    double c;
    double d;
  };
  /// P(D) = a - b (D+1) ln(D+1)
  struct Entropy {
    double a;
    double b;
  };
  /// P(D) = a - b D^k, k = 1 or k >= 2
  struct Power {
    double a;
    double b;
    double k;
  };

  using Params = std::variant<Linear, Quadratic, Cubic, Entropy, Power>;

  static PriceFunction linear(double alpha, double beta) { return PriceFunction(Linear{alpha, beta}); }
  static PriceFunction quadratic(double a, double b, double c) { return PriceFunction(Quadratic{a, b, c}); }
  static PriceFunction cubic(double a, double b, double c, double d) {
    return PriceFunction(Cubic{a, b, c, d});
  }
  static PriceFunction entropy(double a, double b) { return PriceFunction(Entropy{a, b}); }
  static PriceFunction power(double a, double b, double k) { return PriceFunction(Power{a, b, k}); }

  explicit PriceFunction(Params params);

  double value(double demand) const;
  double derivative(double demand) const;
  double second_derivative(double demand) const;

  /// P(D+h) - P(D) - P'(D) h, in closed form where the family allows.
  double taylor_remainder(double demand, double h) const;
  /// P'(D+h) - P'(D) - P''(D) h, in closed form where the family allows.
  double derivative_taylor_remainder(double demand, double h) const;

  const Params& params() const noexcept { return params_; }
  bool is_linear() const noexcept { return std::holds_alternative<Linear>(params_); }
  std::string kind() const;

  /// Smallest D >= 0 with P(D) <= 0, or +inf when the price never reaches zero.
  double choke_demand() const;

  /// Grid check of P' <= 0 and P'' <= 0 on {0, cap/1000, ..., cap}.
  /// Throws Error(NonDecreasingPrice) on the first violating grid point.
  void validate(double demand_cap) const;

 private:
  Params params_;
};

}  // namespace cournot
