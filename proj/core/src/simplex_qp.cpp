#include "spo/simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace spo {

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size();
  if (d == 0) {
    throw std::invalid_argument("project_to_simplex: empty vector");
  }
  std::vector<double> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    css += u[static_cast<std::size_t>(k)];
    const double candidate = (css - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - candidate > 0.0) {
      rho = static_cast<int>(k + 1);
      tau = candidate;
    }
  }
  (void)rho;
  return (v.array() - tau).max(0.0);
}

QpResult minimize_quadratic_on_simplex(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                                       double kkt_tol, int max_iter) {
  const Eigen::Index d = Q.rows();
  if (Q.cols() != d || b.size() != d || d < 1) {
    throw std::invalid_argument("simplex qp: dimension mismatch");
  }
  QpResult out;
  if (d == 1) {
    out.w = Eigen::VectorXd::Ones(1);
    out.converged = true;
    out.kkt_residual = 0.0;
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(2.0 * eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;

  const auto grad = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return 2.0 * (Q * w) + b;
  };
  const auto value = [&](const Eigen::VectorXd& w) -> double {
    return w.dot(Q * w) + b.dot(w);
  };

  Eigen::VectorXd w = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  Eigen::VectorXd y = w;
  double momentum = 1.0;
  double f_w = value(w);

  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd w_next = project_to_simplex(y - step * grad(y));
    double f_next = value(w_next);
    if (f_next > f_w) {
      // momentum overshot; restart from the last monotone point
      y = w;
      momentum = 1.0;
      w_next = project_to_simplex(w - step * grad(w));
      f_next = value(w_next);
    }
    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = w_next + ((momentum - 1.0) / momentum_next) * (w_next - w);
    momentum = momentum_next;
    w = std::move(w_next);
    f_w = f_next;

    out.kkt_residual = (w - project_to_simplex(w - grad(w))).lpNorm<Eigen::Infinity>();
    out.iterations = it;
    if (out.kkt_residual <= kkt_tol) {
      out.converged = true;
      break;
    }
  }
  out.w = std::move(w);
  return out;
}

}  // namespace spo
