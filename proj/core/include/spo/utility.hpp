#pragma once

namespace spo {

enum class UtilityFamily { Logarithmic, Exponential };

/// Concave increasing utility with a shift and (for the exponential family)
/// an absolute risk-aversion parameter.
///
///   Logarithmic: u(z) = log(z + eta),          eta >= 0
///   Exponential: u(z) = 1 - exp(-(a z + eta)), a > 0, eta >= 0
struct UtilitySpec {
  UtilityFamily family = UtilityFamily::Logarithmic;
  double eta = 1.0;
  double aversion = 1.0;  // exponential only

  static UtilitySpec logarithmic(double eta);
  static UtilitySpec exponential(double aversion, double eta = 0.0);

  /// Throws std::domain_error on out-of-range parameters. Solver use
  /// additionally requires eta > 0 for the logarithmic family so that the
  /// gradient stays finite at z = 0.
  void validate(bool for_solver = false) const;
};

/// u(z). Throws std::domain_error when z + eta <= 0 for the logarithmic family.
double utility_value(const UtilitySpec& u, double z);

/// u'(z) > 0 on the domain.
double utility_grad(const UtilitySpec& u, double z);

/// Concave conjugate u*(theta) = inf_z { theta z - u(z) }, finite for theta > 0.
/// Throws std::domain_error for theta <= 0 (the conjugate is unbounded there
/// and the dual objective treats such points as infeasible).
double conjugate_value(const UtilitySpec& u, double theta);

struct LipschitzConstants {
  double value;  // bound on |u'(z)| over z >= 0
  double grad;   // bound on |u''(z)| over z >= 0, i.e. Lipschitz constant of u'
};

LipschitzConstants lipschitz_constants(const UtilitySpec& u);

}  // namespace spo
