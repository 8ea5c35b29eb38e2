#include "cournot/price.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cournot/error.hpp"

namespace cournot {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::NonDecreasingPrice: return "NonDecreasingPrice";
    case ErrorCode::NonConvexCost: return "NonConvexCost";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MethodInapplicable: return "MethodInapplicable";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

PriceFunction::PriceFunction(Params params) : params_(params) {
  const bool finite = std::visit(
      overloaded{
          [](const Linear& p) { return all_finite({p.alpha, p.beta}); },
          [](const Quadratic& p) { return all_finite({p.a, p.b, p.c}); },
          [](const Cubic& p) { return all_finite({p.a, p.b, p.c, p.d}); },
          [](const Entropy& p) { return all_finite({p.a, p.b}); },
          [](const Power& p) { return all_finite({p.a, p.b, p.k}); },
      },
      params_);
  if (!finite) throw Error(ErrorCode::InvalidArgument, "price parameters must be finite");
  if (const auto* p = std::get_if<Power>(&params_)) {
    if (!(p->k == 1.0 || p->k >= 2.0)) {
      throw Error(ErrorCode::InvalidArgument, "power price exponent must be 1 or >= 2");
    }
  }
}

double PriceFunction::value(double D) const {
  return std::visit(overloaded{
                        [D](const Linear& p) { return p.alpha - p.beta * D; },
                        [D](const Quadratic& p) { return p.a - p.b * D - p.c * D * D; },
                        [D](const Cubic& p) { return p.a - D * (p.b + D * (p.c + D * p.d)); },
                        [D](const Entropy& p) { return p.a - p.b * (D + 1.0) * std::log1p(D); },
                        [D](const Power& p) { return p.a - p.b * std::pow(D, p.k); },
                    },
                    params_);
}

double PriceFunction::derivative(double D) const {
  return std::visit(overloaded{
                        [](const Linear& p) { return -p.beta; },
                        [D](const Quadratic& p) { return -p.b - 2.0 * p.c * D; },
                        [D](const Cubic& p) { return -p.b - D * (2.0 * p.c + 3.0 * p.d * D); },
                        [D](const Entropy& p) { return -p.b * (std::log1p(D) + 1.0); },
                        [D](const Power& p) {
                          if (p.k == 1.0) return -p.b;
                          return -p.b * p.k * std::pow(D, p.k - 1.0);
                        },
                    },
                    params_);
}

double PriceFunction::second_derivative(double D) const {
  return std::visit(overloaded{
                        [](const Linear&) { return 0.0; },
                        [](const Quadratic& p) { return -2.0 * p.c; },
                        [D](const Cubic& p) { return -2.0 * p.c - 6.0 * p.d * D; },
                        [D](const Entropy& p) { return -p.b / (D + 1.0); },
                        [D](const Power& p) {
                          if (p.k == 1.0) return 0.0;
                          if (p.k == 2.0) return -2.0 * p.b;
                          return -p.b * p.k * (p.k - 1.0) * std::pow(D, p.k - 2.0);
                        },
                    },
                    params_);
}

double PriceFunction::taylor_remainder(double D, double h) const {
  return std::visit(overloaded{
                        [](const Linear&) { return 0.0; },
                        [h](const Quadratic& p) { return -p.c * h * h; },
                        [D, h](const Cubic& p) { return -p.c * h * h - p.d * h * h * (3.0 * D + h); },
                        [this, D, h](const auto&) { return value(D + h) - value(D) - derivative(D) * h; },
                    },
                    params_);
}

double PriceFunction::derivative_taylor_remainder(double D, double h) const {
  return std::visit(overloaded{
                        [](const Linear&) { return 0.0; },
                        [](const Quadratic&) { return 0.0; },
                        [h](const Cubic& p) { return -3.0 * p.d * h * h; },
                        [this, D, h](const auto&) {
                          return derivative(D + h) - derivative(D) - second_derivative(D) * h;
                        },
                    },
                    params_);
}

std::string PriceFunction::kind() const {
  return std::visit(overloaded{
                        [](const Linear&) { return std::string("linear"); },
                        [](const Quadratic&) { return std::string("quadratic"); },
                        [](const Cubic&) { return std::string("cubic"); },
                        [](const Entropy&) { return std::string("entropy"); },
                        [](const Power&) { return std::string("power"); },
                    },
                    params_);
}

double PriceFunction::choke_demand() const {
  if (value(0.0) <= 0.0) return 0.0;
  double hi = 1.0;
  while (value(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e15) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

void PriceFunction::validate(double demand_cap) const {
  if (!(demand_cap > 0.0) || !std::isfinite(demand_cap)) {
    throw Error(ErrorCode::InvalidArgument, "price check cap must be positive and finite");
  }
  constexpr int kGridPoints = 1000;
  for (int k = 0; k <= kGridPoints; ++k) {
    const double D = demand_cap * k / kGridPoints;
    const double d1 = derivative(D);
    const double d2 = second_derivative(D);
    if (d1 > 0.0 || d2 > 0.0 || !std::isfinite(d1) || !std::isfinite(d2)) {
      std::ostringstream os;
      os << kind() << " price is not decreasing and concave at D=" << D << " (P'=" << d1
         << ", P''=" << d2 << ")";
      throw Error(ErrorCode::NonDecreasingPrice, os.str());
    }
  }
}

}  // namespace cournot
