#include "spo/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "spo/errors.hpp"

namespace spo {

namespace {

constexpr double kDualFeasTol = 1e-9;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw NumericalError(std::string(what) + " is not finite");
  }
}

}  // namespace

Problem::Problem(const PriceRelativeMatrix& data, UtilitySpec utility, double lambda)
    : data_(&data), utility_(utility), lambda_(lambda) {
  utility_.validate();
  if (!(lambda > 0.0)) {
    throw std::domain_error("problem: lambda must be > 0, got " + std::to_string(lambda));
  }
}

double Problem::loss_from_products(const Eigen::VectorXd& z) const {
  const Eigen::Index n = z.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += utility_value(utility_, z[i]);
  }
  return -acc / static_cast<double>(n);
}

double Problem::empirical_loss(const Eigen::VectorXd& w) const {
  return loss_from_products(data_->values() * w);
}

Eigen::VectorXd Problem::loss_inner_gradient(const Eigen::VectorXd& z) const {
  const Eigen::Index n = z.size();
  Eigen::VectorXd g(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g[i] = -utility_grad(utility_, z[i]) * inv_n;
  }
  return g;
}

Eigen::VectorXd Problem::loss_gradient(const Eigen::VectorXd& w,
                                       const std::vector<int>& active) const {
  const Eigen::VectorXd z = data_->values() * w;
  const Eigen::VectorXd dH = loss_inner_gradient(z);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(data_->assets());
  for (int j : active) {
    g[j] = data_->values().col(j).dot(dH);
  }
  return g;
}

double Problem::primal_value(const Eigen::VectorXd& w) const {
  return empirical_loss(w) + lambda_ * w.lpNorm<1>();
}

Eigen::VectorXd Problem::dual_point_from_primal(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd z = data_->values() * w;
  Eigen::VectorXd psi = -loss_inner_gradient(z) / lambda_;
  const Eigen::VectorXd corr = data_->values().transpose() * psi;
  const double positive_part = corr.size() ? std::max(corr.maxCoeff(), 0.0) : 0.0;
  const double denom = std::max(positive_part, 1.0);
  check_finite(denom, "dual scaling denominator");
  return psi / denom;
}

std::optional<double> Problem::dual_value(const Eigen::VectorXd& theta) const {
  const Eigen::Index n = theta.size();
  const double n_lambda = static_cast<double>(n) * lambda_;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = n_lambda * theta[i];
    if (!(t > 0.0)) {
      return std::nullopt;
    }
    acc += conjugate_value(utility_, t);
  }
  return acc / static_cast<double>(n);
}

double Problem::duality_gap(const Eigen::VectorXd& w, const Eigen::VectorXd& theta) const {
  if (w.size() != data_->assets() || theta.size() != data_->periods()) {
    throw std::invalid_argument("duality_gap: dimension mismatch");
  }
  if (w.minCoeff() < -1e-12) {
    throw std::invalid_argument("duality_gap: primal point has negative coordinates");
  }
  const Eigen::VectorXd corr = data_->values().transpose() * theta;
  if (corr.size() && std::max(corr.maxCoeff(), 0.0) > 1.0 + kDualFeasTol) {
    throw std::invalid_argument("duality_gap: dual point violates the correlation bound");
  }
  const std::optional<double> dual = dual_value(theta);
  if (!dual) {
    throw std::invalid_argument("duality_gap: dual point outside the dual domain");
  }
  const double gap = primal_value(w) - *dual;
  check_finite(gap, "duality gap");
  return gap;
}

double lambda_max(const PriceRelativeMatrix& data, const UtilitySpec& utility) {
  utility.validate(/*for_solver=*/true);
  const double grad_at_zero = utility_grad(utility, 0.0);
  const Eigen::VectorXd means = data.values().colwise().mean();
  return grad_at_zero * means.cwiseAbs().maxCoeff();
}

double loss_gradient_lipschitz(const PriceRelativeMatrix& data, const UtilitySpec& utility) {
  utility.validate(/*for_solver=*/true);
  const double n = static_cast<double>(data.periods());
  const double curvature = lipschitz_constants(utility).grad / n;
  const Eigen::MatrixXd& X = data.values();
  // spectral norm of X via the smaller Gram matrix
  Eigen::MatrixXd gram;
  if (X.rows() <= X.cols()) {
    gram = X * X.transpose();
  } else {
    gram = X.transpose() * X;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double sigma_sq = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  return curvature * sigma_sq;
}

}  // namespace spo
