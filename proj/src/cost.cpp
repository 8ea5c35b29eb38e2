#include "cournot/cost.hpp"

#include <cmath>
#include <random>
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

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

void check_dim(std::size_t expected, std::size_t dim, const char* field) {
  if (expected != dim) {
    std::ostringstream os;
    os << "cost field '" << field << "' has length " << expected << " but the firm has " << dim
       << " incident edges";
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
}

}  // namespace

CostFunction::CostFunction(Params params) : params_(std::move(params)) {
  std::visit(overloaded{
                 [](const QuadraticTotal& p) {
                   require(std::isfinite(p.lambda), ErrorCode::InvalidArgument, "lambda must be finite");
                 },
                 [](const SeparableQuadratic& p) {
                   require(p.lambda.size() == p.mu.size(), ErrorCode::ShapeMismatch,
                           "separable cost lambda and mu lengths differ");
                   for (std::size_t e = 0; e < p.lambda.size(); ++e) {
                     require(std::isfinite(p.lambda[e]) && std::isfinite(p.mu[e]),
                             ErrorCode::InvalidArgument, "separable cost parameters must be finite");
                   }
                 },
                 [](QuadraticForm& p) {
                   require(p.A.rows() == p.A.cols() && p.A.rows() == p.b.size(), ErrorCode::ShapeMismatch,
                           "quadratic form A must be square and match b");
                   require(p.A.allFinite() && p.b.allFinite(), ErrorCode::InvalidArgument,
                           "quadratic form entries must be finite");
                   const Eigen::MatrixXd sym = 0.5 * (p.A + p.A.transpose());
                   p.A = sym;
                 },
             },
             params_);
}

std::string CostFunction::kind() const {
  return std::visit(overloaded{
                        [](const QuadraticTotal&) { return std::string("quadratic_total"); },
                        [](const SeparableQuadratic&) { return std::string("separable_quadratic"); },
                        [](const QuadraticForm&) { return std::string("quadratic_form"); },
                    },
                    params_);
}

std::optional<std::size_t> CostFunction::fixed_dimension() const {
  return std::visit(overloaded{
                        [](const QuadraticTotal&) -> std::optional<std::size_t> { return std::nullopt; },
                        [](const SeparableQuadratic& p) -> std::optional<std::size_t> { return p.lambda.size(); },
                        [](const QuadraticForm& p) -> std::optional<std::size_t> {
                          return static_cast<std::size_t>(p.b.size());
                        },
                    },
                    params_);
}

double CostFunction::value(const Eigen::VectorXd& s) const {
  return std::visit(overloaded{
                        [&](const QuadraticTotal& p) {
                          const double total = s.sum();
                          return 0.5 * p.lambda * total * total;
                        },
                        [&](const SeparableQuadratic& p) {
                          double c = 0.0;
                          for (Eigen::Index e = 0; e < s.size(); ++e) {
                            c += 0.5 * p.lambda[e] * s[e] * s[e] + p.mu[e] * s[e];
                          }
                          return c;
                        },
                        [&](const QuadraticForm& p) { return 0.5 * s.dot(p.A * s) + p.b.dot(s); },
                    },
                    params_);
}

Eigen::VectorXd CostFunction::gradient(const Eigen::VectorXd& s) const {
  return std::visit(overloaded{
                        [&](const QuadraticTotal& p) -> Eigen::VectorXd {
                          return Eigen::VectorXd::Constant(s.size(), p.lambda * s.sum());
                        },
                        [&](const SeparableQuadratic& p) -> Eigen::VectorXd {
                          Eigen::VectorXd g(s.size());
                          for (Eigen::Index e = 0; e < s.size(); ++e) g[e] = p.lambda[e] * s[e] + p.mu[e];
                          return g;
                        },
                        [&](const QuadraticForm& p) -> Eigen::VectorXd { return p.A * s + p.b; },
                    },
                    params_);
}

Eigen::MatrixXd CostFunction::hessian(std::size_t dim) const {
  const auto n = static_cast<Eigen::Index>(dim);
  return std::visit(overloaded{
                        [&](const QuadraticTotal& p) -> Eigen::MatrixXd {
                          return Eigen::MatrixXd::Constant(n, n, p.lambda);
                        },
                        [&](const SeparableQuadratic& p) -> Eigen::MatrixXd {
                          Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
                          for (Eigen::Index e = 0; e < n; ++e) H(e, e) = p.lambda[e];
                          return H;
                        },
                        [&](const QuadraticForm& p) -> Eigen::MatrixXd { return p.A; },
                    },
                    params_);
}

void CostFunction::validate(std::size_t dim) const {
  std::visit(overloaded{
                 [&](const QuadraticTotal& p) {
                   require(p.lambda >= 0.0, ErrorCode::NonConvexCost, "quadratic_total lambda must be >= 0");
                 },
                 [&](const SeparableQuadratic& p) {
                   check_dim(p.lambda.size(), dim, "lambda");
                   for (std::size_t e = 0; e < dim; ++e) {
                     require(p.lambda[e] >= 0.0, ErrorCode::NonConvexCost,
                             "separable_quadratic lambda must be >= 0");
                     require(p.mu[e] >= 0.0, ErrorCode::NonConvexCost, "separable_quadratic mu must be >= 0");
                   }
                 },
                 [&](const QuadraticForm& p) {
                   check_dim(static_cast<std::size_t>(p.b.size()), dim, "b");
                   for (Eigen::Index e = 0; e < p.b.size(); ++e) {
                     require(p.b[e] >= 0.0, ErrorCode::NonConvexCost, "quadratic_form b must be >= 0");
                   }
                   // Directional second differences c(s+td) + c(s-td) - 2c(s) = t^2 d^T A d
                   // along the principal axes of A and a batch of seeded random directions.
                   const auto n = p.A.rows();
                   if (n == 0) return;
                   Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.A);
                   std::vector<Eigen::VectorXd> directions;
                   for (Eigen::Index k = 0; k < n; ++k) directions.push_back(eig.eigenvectors().col(k));
                   std::mt19937_64 rng(0x5eed);
                   std::normal_distribution<double> normal;
                   for (int k = 0; k < 32; ++k) {
                     Eigen::VectorXd d(n);
                     for (Eigen::Index i = 0; i < n; ++i) d[i] = normal(rng);
                     directions.push_back(d.normalized());
                   }
                   const double scale = std::max(1.0, p.A.cwiseAbs().maxCoeff());
                   const Eigen::VectorXd s = Eigen::VectorXd::Ones(n);
                   const double base = value(s);
                   for (const auto& d : directions) {
                     const double t = 1.0;
                     const double second = value(s + t * d) + value(s - t * d) - 2.0 * base;
                     if (second < -1e-10 * scale) {
                       throw Error(ErrorCode::NonConvexCost, "quadratic_form A is not positive semidefinite");
                     }
                   }
                 },
             },
             params_);
}

std::optional<SeparableTerms> CostFunction::separable_terms(std::size_t dim) const {
  return std::visit(
      overloaded{
          [&](const QuadraticTotal& p) -> std::optional<SeparableTerms> {
            if (dim > 1 && p.lambda != 0.0) return std::nullopt;
            return SeparableTerms{std::vector<double>(dim, p.lambda), std::vector<double>(dim, 0.0)};
          },
          [&](const SeparableQuadratic& p) -> std::optional<SeparableTerms> {
            return SeparableTerms{p.lambda, p.mu};
          },
          [&](const QuadraticForm& p) -> std::optional<SeparableTerms> {
            const Eigen::MatrixXd off = p.A - Eigen::MatrixXd(p.A.diagonal().asDiagonal());
            if (off.size() > 0 && off.cwiseAbs().maxCoeff() != 0.0) return std::nullopt;
            SeparableTerms t;
            for (Eigen::Index e = 0; e < p.b.size(); ++e) {
              t.lambda.push_back(p.A(e, e));
              t.mu.push_back(p.b[e]);
            }
            return t;
          },
      },
      params_);
}

}  // namespace cournot
