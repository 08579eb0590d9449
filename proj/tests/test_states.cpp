#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <vector>

#include "rydsim/states.hpp"
#include "rydsim/types.hpp"

using namespace rydsim;

namespace {
const double kThird = 2.0 * kPi / 3.0;
}

TEST_CASE("basis helpers") {
  CHECK(basis_dim(1) == 2);
  CHECK(basis_dim(3) == 8);
  CHECK(excitation_number(0) == 0);
  CHECK(excitation_number(0b101) == 2);
  CHECK(codes_with_weight(4, 2).size() == 6);
  CHECK(codes_with_weight(3, 0) == std::vector<int>{0});
  CHECK(codes_with_weight(3, 1) == std::vector<int>{1, 2, 4});
  CHECK_THROWS_AS(basis_dim(13), std::domain_error);
  CHECK_THROWS_AS(basis_dim(0), std::domain_error);
}

TEST_CASE("state vector normalization and equality") {
  Vector v = Vector::Zero(2);
  v(0) = 2.0;
  StateVector psi(1, v);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));

  Vector zero = Vector::Zero(2);
  CHECK_THROWS_AS(StateVector(1, zero), std::invalid_argument);

  const StateVector a = StateVector::basis_state(2, 1);
  Vector b = Vector::Zero(4);
  b(1) = std::exp(Complex(0.0, 0.7));
  CHECK(a.equals_up_to_phase(StateVector(2, b)));
  CHECK_FALSE(a.equals_up_to_phase(StateVector::basis_state(2, 2)));
}

TEST_CASE("twisted Dicke constructors") {
  const std::vector<double> zero3 = {0.0, 0.0, 0.0};
  CHECK(build_twisted_dicke(3, 0, zero3).equals_up_to_phase(
      StateVector::basis_state(3, 0)));

  // a = 1 with phases (-2pi/3, 0, 2pi/3) is the s = +1 chiral W state.
  const std::vector<double> chiral = {-kThird, 0.0, kThird};
  CHECK(build_twisted_dicke(3, 1, chiral).equals_up_to_phase(zeta_state(1, 1)));

  const std::vector<double> zero4 = {0.0, 0.0, 0.0, 0.0};
  const StateVector d42 = build_twisted_dicke(4, 2, zero4);
  for (int code : codes_with_weight(4, 2)) {
    CHECK(std::abs(d42.amp(code)) ==
          doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(build_twisted_dicke(3, 4, zero3), std::domain_error);
  CHECK_THROWS_AS(build_twisted_dicke(3, -1, zero3), std::domain_error);
}

TEST_CASE("general W state") {
  const std::vector<Complex> amps = {Complex(1.0), Complex(0.0, 1.0),
                                     Complex(-1.0)};
  const StateVector w = build_general_w(amps);
  CHECK(std::abs(w.amp(1)) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(w.amp(0) == Complex(0.0));
  const std::vector<Complex> single = {Complex(1.0), Complex(0.0)};
  CHECK_THROWS_AS(build_general_w(single), std::domain_error);
}

TEST_CASE("zeta basis is orthonormal and complete") {
  std::vector<StateVector> basis;
  basis.push_back(StateVector::basis_state(3, 0));
  basis.push_back(StateVector::basis_state(3, 7));
  for (int a : {1, 2}) {
    for (int s : {-1, 0, 1}) basis.push_back(zeta_state(a, s));
  }
  for (size_t i = 0; i < basis.size(); ++i) {
    for (size_t j = 0; j < basis.size(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      CHECK(std::abs(basis[i].inner(basis[j])) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("zeta_1 states coincide with twisted W states") {
  for (int s : {-1, 0, 1}) {
    const std::vector<double> phases = {-s * kThird, 0.0, s * kThird};
    CHECK(zeta_state(1, s).equals_up_to_phase(
        build_twisted_dicke(3, 1, phases)));
  }
}

TEST_CASE("chirality operator spectrum and eigenbasis") {
  const OperatorMatrix chi = chirality_operator();
  CHECK(chi.hermiticity_error() < 1e-12);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(chi.entries);
  const auto& evals = solver.eigenvalues();
  int minus = 0, zero = 0, plus = 0;
  for (int i = 0; i < evals.size(); ++i) {
    if (evals(i) < -0.5) ++minus;
    else if (evals(i) > 0.5) ++plus;
    else ++zero;
  }
  CHECK(minus == 2);
  CHECK(zero == 4);
  CHECK(plus == 2);

  auto eigencheck = [&chi](const StateVector& state, double value) {
    const Vector residual =
        chi.entries * state.amplitudes() - value * state.amplitudes();
    CHECK(residual.norm() < 1e-12);
  };
  eigencheck(zeta_state(1, 1), 1.0);
  eigencheck(zeta_state(2, 1), 1.0);
  eigencheck(zeta_state(1, -1), -1.0);
  eigencheck(zeta_state(2, -1), -1.0);
  eigencheck(zeta_state(1, 0), 0.0);
  eigencheck(zeta_state(2, 0), 0.0);
  eigencheck(StateVector::basis_state(3, 0), 0.0);
  eigencheck(StateVector::basis_state(3, 7), 0.0);
}

TEST_CASE("twist unitary") {
  const std::vector<double> phases = {0.3, -1.1, 2.2};
  const OperatorMatrix u = twist_unitary(phases);
  const Matrix prod = u.entries * u.entries.adjoint();
  CHECK((prod - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);

  // U(phi) D^3_a = D^3_a(phi)
  for (int a = 0; a <= 3; ++a) {
    const Vector lhs = u.entries * build_dicke(3, a).amplitudes();
    CHECK((lhs - build_twisted_dicke(3, a, phases).amplitudes()).norm() <
          1e-12);
  }

  // composition: U(phi) U(psi) = U(phi + psi)
  const std::vector<double> other = {1.0, 0.5, -0.4};
  std::vector<double> sum(3);
  for (int i = 0; i < 3; ++i) sum[i] = phases[i] + other[i];
  const Matrix composed = u.entries * twist_unitary(other).entries;
  CHECK((composed - twist_unitary(sum).entries).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hd2 connects equal-weight codes at Hamming distance two") {
  const OperatorMatrix h = hd2_operator(3);
  CHECK(h.hermiticity_error() < 1e-12);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const bool connected =
          excitation_number(i) == excitation_number(j) &&
          excitation_number(i ^ j) == 2;
      CHECK(std::abs(h.entries(i, j) - (connected ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("sigma_minus carries Dicke ladder coefficients") {
  for (int n : {3, 4}) {
    for (int a = 1; a <= n; ++a) {
      const Vector mapped =
          sigma_minus(n, a).entries * build_dicke(n, a).amplitudes();
      const Vector expected = std::sqrt(static_cast<double>(a) * (n - a + 1)) *
                              build_dicke(n, a - 1).amplitudes();
      CHECK((mapped - expected).norm() < 1e-12);
    }
    // annihilates other weights
    const Vector killed =
        sigma_minus(n, 1).entries * build_dicke(n, 2).amplitudes();
    CHECK(killed.norm() < 1e-14);
  }
}

TEST_CASE("excitation projectors resolve the identity") {
  Matrix sum = Matrix::Zero(8, 8);
  for (int a = 0; a <= 3; ++a) {
    const OperatorMatrix p = excitation_projector(3, a);
    CHECK((p.entries * p.entries - p.entries).cwiseAbs().maxCoeff() < 1e-14);
    sum += p.entries;
  }
  CHECK((sum - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pure-state fidelity") {
  CHECK(fidelity(build_ghz(3, 0.0), build_ghz(3, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // orthogonal GHZ pair
  CHECK(fidelity(build_ghz(3, 0.0), build_ghz(3, kPi)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fidelity(build_ghz(3, 0.0), StateVector::basis_state(3, 0)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // global-phase invariance
  Vector v = build_ghz(3, 1.1).amplitudes() * std::exp(Complex(0.0, 0.4));
  CHECK(fidelity(StateVector(3, v), build_ghz(3, 1.1)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("density matrix checks and mixed-state fidelity") {
  const DensityMatrix rho = DensityMatrix::pure(build_ghz(3, 0.0));
  CHECK(rho.trace_error() < 1e-12);
  CHECK(rho.hermiticity_error() < 1e-12);
  CHECK(rho.min_eigenvalue() > -1e-12);
  CHECK(fidelity(rho, build_ghz(3, 0.0)) == doctest::Approx(1.0));

  const DensityMatrix mixed(3, Matrix::Identity(8, 8) / 8.0);
  CHECK(fidelity(mixed, build_ghz(3, 0.0)) ==
        doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-12));

  Matrix bad = Matrix::Identity(8, 8) / 8.0;
  bad(0, 1) = Complex(0.0, 0.5);
  CHECK_THROWS_AS(DensityMatrix(3, bad), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix(3, Matrix::Identity(8, 8)),
                  std::invalid_argument);
}
