#include "spo/utility.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spo {

UtilitySpec UtilitySpec::logarithmic(double eta) {
  UtilitySpec u;
  u.family = UtilityFamily::Logarithmic;
  u.eta = eta;
  u.aversion = 1.0;
  return u;
}

UtilitySpec UtilitySpec::exponential(double aversion, double eta) {
  UtilitySpec u;
  u.family = UtilityFamily::Exponential;
  u.eta = eta;
  u.aversion = aversion;
  return u;
}

void UtilitySpec::validate(bool for_solver) const {
  if (!(eta >= 0.0)) {
    throw std::domain_error("utility: eta must be >= 0, got " + std::to_string(eta));
  }
  if (family == UtilityFamily::Exponential && !(aversion > 0.0)) {
    throw std::domain_error("utility: exponential aversion must be > 0, got " +
                            std::to_string(aversion));
  }
  if (for_solver && family == UtilityFamily::Logarithmic && !(eta > 0.0)) {
    throw std::domain_error(
        "utility: logarithmic family needs eta > 0 inside the solver "
        "(gradient at z = 0 must be finite)");
  }
}

double utility_value(const UtilitySpec& u, double z) {
  switch (u.family) {
    case UtilityFamily::Logarithmic: {
      const double shifted = z + u.eta;
      if (!(shifted > 0.0)) {
        throw std::domain_error("log utility: z + eta must be > 0, got " +
                                std::to_string(shifted));
      }
      return std::log(shifted);
    }
    case UtilityFamily::Exponential:
      return 1.0 - std::exp(-(u.aversion * z + u.eta));
  }
  throw std::domain_error("utility: unknown family");
}

double utility_grad(const UtilitySpec& u, double z) {
  switch (u.family) {
    case UtilityFamily::Logarithmic: {
      const double shifted = z + u.eta;
      if (!(shifted > 0.0)) {
        throw std::domain_error("log utility: z + eta must be > 0, got " +
                                std::to_string(shifted));
      }
      return 1.0 / shifted;
    }
    case UtilityFamily::Exponential:
      return u.aversion * std::exp(-(u.aversion * z + u.eta));
  }
  throw std::domain_error("utility: unknown family");
}

double conjugate_value(const UtilitySpec& u, double theta) {
  if (!(theta > 0.0)) {
    throw std::domain_error("conjugate: theta must be > 0, got " + std::to_string(theta));
  }
  switch (u.family) {
    case UtilityFamily::Logarithmic:
      // minimizer of theta z - log(z + eta) is z = 1/theta - eta
      return std::log(theta) - u.eta * theta + 1.0;
    case UtilityFamily::Exponential: {
      const double ratio = theta / u.aversion;
      return -ratio * std::log(ratio) + ratio - theta * u.eta / u.aversion - 1.0;
    }
  }
  throw std::domain_error("utility: unknown family");
}

LipschitzConstants lipschitz_constants(const UtilitySpec& u) {
  u.validate(/*for_solver=*/u.family == UtilityFamily::Logarithmic);
  switch (u.family) {
    case UtilityFamily::Logarithmic:
      // |u'| and |u''| are both maximal at z = 0 on the nonnegative ray
      return {1.0 / u.eta, 1.0 / (u.eta * u.eta)};
    case UtilityFamily::Exponential: {
      const double scale = std::exp(-u.eta);
      return {u.aversion * scale, u.aversion * u.aversion * scale};
    }
  }
  throw std::domain_error("utility: unknown family");
}

}  // namespace spo
