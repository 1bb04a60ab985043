#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spo/screening.hpp"
#include "spo/solver.hpp"
#include "support/oracles.hpp"

using spo::PriceRelativeMatrix;
using spo::ScreenState;
using spo::UtilitySpec;

TEST_CASE("dual strong-concavity modulus at pinned points") {
  CHECK(spo::strong_concavity_alpha(UtilitySpec::logarithmic(1.0), 1.0, 1) ==
        doctest::Approx(1.0));
  CHECK(spo::strong_concavity_alpha(UtilitySpec::logarithmic(2.0), 1.0, 4) ==
        doctest::Approx(16.0));
  CHECK(spo::strong_concavity_alpha(UtilitySpec::exponential(1.0, 0.0), 0.5, 2) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(spo::strong_concavity_alpha(UtilitySpec::logarithmic(1.0), 0.0, 1),
                  std::invalid_argument);
}

TEST_CASE("safe radius") {
  CHECK(spo::safe_radius(0.0, 1.0) == 0.0);
  CHECK(spo::safe_radius(2.0, 1.0) == doctest::Approx(2.0));
  CHECK(spo::safe_radius(1.0, 8.0) == doctest::Approx(0.5));
  CHECK(spo::safe_radius(-1e-14, 3.0) == 0.0);  // round-off clamps to zero
  CHECK_THROWS_AS(spo::safe_radius(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("rule never fires when the bound stays above one") {
  const Eigen::MatrixXd X = oracle::random_relatives(6, 4, 21);
  const PriceRelativeMatrix m = PriceRelativeMatrix::validated(X);
  ScreenState state = ScreenState::all_active(4, 1.0);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(6, 1.0 / 6.0);
  const ScreenState after = spo::screen(m, theta, /*radius=*/100.0, state);
  CHECK(after.active == state.active);
  CHECK(after.screened.empty());
}

TEST_CASE("a zero column screens immediately") {
  Eigen::MatrixXd X(2, 2);
  X << 1.0, 0.0, 1.0, 0.0;  // synthetic: second column all zero
  const PriceRelativeMatrix m = PriceRelativeMatrix::unchecked(X);
  Eigen::VectorXd theta(2);
  theta << 0.5, 0.5;  // feasible: max column correlation is 1
  ScreenState state = ScreenState::all_active(2, 1.0);
  const ScreenState after = spo::screen(m, theta, /*radius=*/0.3, state);
  CHECK(after.screened == std::vector<int>{1});
  CHECK(after.active == std::vector<int>{0});
}

TEST_CASE("screen is idempotent and the screened set only grows") {
  const Eigen::MatrixXd X = oracle::random_relatives(8, 10, 33);
  const PriceRelativeMatrix m = PriceRelativeMatrix::validated(X);
  Eigen::VectorXd psi = Eigen::VectorXd::Constant(8, 0.05);
  ScreenState state = ScreenState::all_active(10, 1.0);

  const ScreenState once = spo::screen(m, psi, 0.01, state);
  const ScreenState twice = spo::screen(m, psi, 0.01, once);
  CHECK(once.active == twice.active);
  CHECK(once.screened == twice.screened);
  CHECK(once.screened.size() + once.active.size() == 10);

  // a larger radius later cannot resurrect screened columns
  const ScreenState wide = spo::screen(m, psi, 10.0, once);
  CHECK(wide.screened.size() >= once.screened.size());
}

TEST_CASE("screened columns are zero in a tightly solved reference") {
  const Eigen::MatrixXd X = oracle::random_relatives(24, 100, 77, 0.05);
  const PriceRelativeMatrix m = PriceRelativeMatrix::validated(X);
  const UtilitySpec u = UtilitySpec::logarithmic(0.8);
  const double lmax = spo::lambda_max(m, u);

  spo::SolverConfig tight;
  tight.tol = 1e-10;
  tight.max_iter = 200000;

  spo::SolverConfig reference = tight;
  reference.screening = false;

  for (double ratio : {0.5, 0.1, 0.02}) {
    const spo::Problem p(m, u, ratio * lmax);
    const spo::SolveResult screened = spo::solve(p, tight);
    const spo::SolveResult unscreened = spo::solve(p, reference);
    REQUIRE(screened.converged);
    REQUIRE(unscreened.converged);
    for (int j : screened.screened_indices) {
      CHECK(std::abs(unscreened.weights_raw[j]) < 1e-8);
    }
    // screened counts along the trace never decrease
    for (std::size_t k = 1; k < screened.trace.size(); ++k) {
      CHECK(screened.trace[k].screened >= screened.trace[k - 1].screened);
    }
  }
}
