#include "rydsim/states.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace rydsim {

namespace {

void check_n_atoms(int n_atoms) {
  if (n_atoms < 1 || n_atoms > kMaxAtoms) {
    throw std::domain_error("n_atoms must be in [1, 12], got " +
                            std::to_string(n_atoms));
  }
}

}  // namespace

int basis_dim(int n_atoms) {
  check_n_atoms(n_atoms);
  return 1 << n_atoms;
}

int excitation_number(int code) { return std::popcount(static_cast<unsigned>(code)); }

std::vector<int> codes_with_weight(int n_atoms, int a) {
  std::vector<int> codes;
  const int dim = basis_dim(n_atoms);
  for (int code = 0; code < dim; ++code) {
    if (excitation_number(code) == a) codes.push_back(code);
  }
  return codes;
}

StateVector::StateVector(int n_atoms, Vector amplitudes)
    : n_atoms_(n_atoms), amps_(std::move(amplitudes)) {
  if (amps_.size() != basis_dim(n_atoms)) {
    throw std::invalid_argument("amplitude vector size does not match 2^N");
  }
  const double n = amps_.norm();
  if (std::abs(n - 1.0) > 1e-12) {
    if (n < 1e-14) throw std::invalid_argument("zero state vector");
    amps_ /= n;
  }
}

StateVector StateVector::basis_state(int n_atoms, int code) {
  Vector v = Vector::Zero(basis_dim(n_atoms));
  if (code < 0 || code >= v.size()) throw std::domain_error("basis code out of range");
  v(code) = 1.0;
  return StateVector(n_atoms, std::move(v));
}

Complex StateVector::inner(const StateVector& other) const {
  if (dim() != other.dim()) throw std::domain_error("dimension mismatch");
  return amps_.dot(other.amps_);  // Eigen dot conjugates the left argument
}

bool StateVector::equals_up_to_phase(const StateVector& other, double tol) const {
  if (dim() != other.dim()) return false;
  return std::abs(1.0 - std::abs(inner(other))) < tol;
}

DensityMatrix::DensityMatrix(int n_atoms, Matrix entries)
    : n_atoms_(n_atoms), rho_(std::move(entries)) {
  const int dim = basis_dim(n_atoms);
  if (rho_.rows() != dim || rho_.cols() != dim) {
    throw std::invalid_argument("density matrix size does not match 2^N");
  }
  if (hermiticity_error() > 1e-10) {
    throw std::invalid_argument("density matrix not Hermitian");
  }
  if (trace_error() > 1e-7) {
    throw std::invalid_argument("density matrix trace differs from 1");
  }
  if (min_eigenvalue() < -1e-7) {
    throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.n_atoms(),
                       psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::trace_error() const {
  return std::abs(rho_.trace().real() - 1.0) + std::abs(rho_.trace().imag());
}

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()));
  return es.eigenvalues().minCoeff();
}

StateVector build_twisted_dicke(int n_atoms, int excitation,
                                std::span<const double> site_phases) {
  const int dim = basis_dim(n_atoms);
  if (excitation < 0 || excitation > n_atoms) {
    throw std::domain_error("excitation number outside [0, N]");
  }
  if (site_phases.size() != static_cast<size_t>(n_atoms)) {
    throw std::invalid_argument("need one site phase per atom");
  }
  Vector v = Vector::Zero(dim);
  for (int code : codes_with_weight(n_atoms, excitation)) {
    double phase = 0.0;
    for (int n = 0; n < n_atoms; ++n) {
      if (code & (1 << n)) phase += site_phases[n];
    }
    v(code) = std::polar(1.0, phase);
  }
  return StateVector(n_atoms, std::move(v));
}

StateVector build_dicke(int n_atoms, int excitation) {
  std::vector<double> zeros(n_atoms, 0.0);
  return build_twisted_dicke(n_atoms, excitation, zeros);
}

StateVector build_general_w(std::span<const Complex> amplitudes) {
  const int n_atoms = static_cast<int>(amplitudes.size());
  const int dim = basis_dim(n_atoms);
  int nonzero = 0;
  for (const Complex& a : amplitudes) {
    if (std::abs(a) > 0.0) ++nonzero;
  }
  if (nonzero < 2) {
    throw std::domain_error("general W state needs at least two nonzero amplitudes");
  }
  Vector v = Vector::Zero(dim);
  for (int n = 0; n < n_atoms; ++n) v(1 << n) = amplitudes[n];
  return StateVector(n_atoms, std::move(v));
}

StateVector build_ghz(int n_atoms, double relative_phase) {
  if (n_atoms < 2) throw std::domain_error("GHZ state needs N >= 2");
  const int dim = basis_dim(n_atoms);
  Vector v = Vector::Zero(dim);
  v(0) = 1.0;
  v(dim - 1) = std::polar(1.0, relative_phase);
  return StateVector(n_atoms, std::move(v));
}

StateVector zeta_state(int excitation, int s) {
  const Complex w = std::polar(1.0, 2.0 * kPi / 3.0);
  Vector v = Vector::Zero(8);
  switch (excitation) {
    case 0:
      if (s != 0) throw std::domain_error("zeta_00 is the only a=0 state");
      v(0) = 1.0;
      break;
    case 3:
      if (s != 0) throw std::domain_error("zeta_30 is the only a=3 state");
      v(7) = 1.0;
      break;
    case 1: {
      // codes: |rgg> = 1, |grg> = 2, |ggr> = 4
      Complex c1 = 1.0, c3 = 1.0;
      if (s == 1) { c1 = std::conj(w); c3 = w; }
      else if (s == -1) { c1 = w; c3 = std::conj(w); }
      else if (s != 0) throw std::domain_error("s must be -1, 0 or +1");
      v(1) = c1; v(2) = 1.0; v(4) = c3;
      break;
    }
    case 2: {
      // codes: |grr> = 6, |rgr> = 5, |rrg> = 3
      Complex c1 = 1.0, c3 = 1.0;
      if (s == 1) { c1 = std::conj(w); c3 = w; }
      else if (s == -1) { c1 = w; c3 = std::conj(w); }
      else if (s != 0) throw std::domain_error("s must be -1, 0 or +1");
      v(6) = c1; v(5) = 1.0; v(3) = c3;
      break;
    }
    default:
      throw std::domain_error("excitation outside [0, 3]");
  }
  return StateVector(3, std::move(v));
}

namespace {

// Single-qubit operator on atom n embedded into the 2^N space; local basis
// order (|g>, |r>).
Matrix embed_single(int n_atoms, int atom, const Eigen::Matrix2cd& op) {
  const int dim = basis_dim(n_atoms);
  Matrix out = Matrix::Zero(dim, dim);
  const int bit = 1 << atom;
  for (int j = 0; j < dim; ++j) {
    const int rest = j & ~bit;
    const int bj = (j >> atom) & 1;
    for (int bi = 0; bi < 2; ++bi) {
      const Complex e = op(bi, bj);
      if (e != Complex(0.0)) out(rest | (bi << atom), j) += e;
    }
  }
  return out;
}

}  // namespace

OperatorMatrix chirality_operator() {
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  const Eigen::Matrix2cd pauli[3] = {sx, sy, sz};

  // Levi-Civita permutations of (x, y, z)
  const int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                          {0, 2, 1}, {1, 0, 2}, {2, 1, 0}};
  const double sign[6] = {1, 1, 1, -1, -1, -1};

  Matrix chi = Matrix::Zero(8, 8);
  for (int p = 0; p < 6; ++p) {
    chi += sign[p] * (embed_single(3, 0, pauli[perm[p][0]]) *
                      embed_single(3, 1, pauli[perm[p][1]]) *
                      embed_single(3, 2, pauli[perm[p][2]]));
  }
  chi /= 2.0 * std::sqrt(3.0);
  return OperatorMatrix{3, std::move(chi), true};
}

OperatorMatrix twist_unitary(std::span<const double> site_phases) {
  const int n_atoms = static_cast<int>(site_phases.size());
  const int dim = basis_dim(n_atoms);
  Matrix u = Matrix::Zero(dim, dim);
  for (int code = 0; code < dim; ++code) {
    double phase = 0.0;
    for (int n = 0; n < n_atoms; ++n) {
      if (code & (1 << n)) phase += site_phases[n];
    }
    u(code, code) = std::polar(1.0, phase);
  }
  return OperatorMatrix{n_atoms, std::move(u), false};
}

OperatorMatrix hd2_operator(int n_atoms) {
  if (n_atoms < 2) throw std::domain_error("Hd2 needs N >= 2");
  const int dim = basis_dim(n_atoms);
  Matrix m = Matrix::Zero(dim, dim);
  for (int code = 0; code < dim; ++code) {
    for (int n1 = 0; n1 < n_atoms; ++n1) {
      if (!(code & (1 << n1))) continue;  // n1 de-excites
      for (int n2 = 0; n2 < n_atoms; ++n2) {
        if (n2 == n1 || (code & (1 << n2))) continue;  // n2 excites
        m((code & ~(1 << n1)) | (1 << n2), code) += 1.0;
      }
    }
  }
  return OperatorMatrix{n_atoms, std::move(m), true};
}

OperatorMatrix sigma_minus(int n_atoms, int from_excitation) {
  if (from_excitation < 1 || from_excitation > n_atoms) {
    throw std::domain_error("sigma_minus excitation outside [1, N]");
  }
  const int dim = basis_dim(n_atoms);
  Matrix m = Matrix::Zero(dim, dim);
  for (int code : codes_with_weight(n_atoms, from_excitation)) {
    for (int n = 0; n < n_atoms; ++n) {
      if (code & (1 << n)) m(code & ~(1 << n), code) += 1.0;
    }
  }
  return OperatorMatrix{n_atoms, std::move(m), false};
}

OperatorMatrix excitation_projector(int n_atoms, int a) {
  if (a < 0 || a > n_atoms) throw std::domain_error("projector weight outside [0, N]");
  const int dim = basis_dim(n_atoms);
  Matrix p = Matrix::Zero(dim, dim);
  for (int code : codes_with_weight(n_atoms, a)) p(code, code) = 1.0;
  return OperatorMatrix{n_atoms, std::move(p), true};
}

double fidelity(const StateVector& state, const StateVector& target) {
  if (state.dim() != target.dim()) throw std::domain_error("dimension mismatch");
  return std::abs(target.inner(state));
}

double fidelity(const DensityMatrix& state, const StateVector& target) {
  if (state.dim() != target.dim()) throw std::domain_error("dimension mismatch");
  const Complex q = target.amplitudes().adjoint() * state.entries() *
                    target.amplitudes();
  return std::sqrt(std::max(0.0, q.real()));
}

}  // namespace rydsim
