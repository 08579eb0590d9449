#pragma once

#include <stdexcept>
#include <string>

namespace rydsim {

/// Invalid or inconsistent run parameters (bad pathway name, off-resonance
/// beyond tolerance, malformed config). CLI exit code 2.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Propagation failed its convergence or physicality checks. CLI exit code 3.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A twisted-ladder overlap |Sigma| fell below the configured floor: the
/// fields address (nearly) orthogonal states. CLI exit code 4.
class OrthogonalDriveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vanishing energy denominator (coincident atoms, Delta_0 - aV near zero).
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydsim
