#pragma once

#include <complex>
#include <Eigen/Dense>

namespace rydsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

// All rates and energies are expressed with hbar = 1, in units of 1/T for a
// run-specific characteristic time T. Lengths are in units of the resonance
// wavelength lambda_0.

}  // namespace rydsim
