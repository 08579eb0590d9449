#pragma once

#include <span>
#include <vector>

#include "rydsim/types.hpp"

namespace rydsim {

// Basis convention: an N-atom basis state is a code in [0, 2^N) where bit n
// set means atom n is in |r>. Code 0 is |g...g>; the amplitude array is
// indexed directly by code (little-endian).

inline constexpr int kMaxAtoms = 12;

int basis_dim(int n_atoms);
int excitation_number(int code);

// All codes of Hamming weight a, ascending.
std::vector<int> codes_with_weight(int n_atoms, int a);

/// Pure state over the 2^N atomic basis. Unit norm enforced at construction.
class StateVector {
 public:
  StateVector(int n_atoms, Vector amplitudes);

  static StateVector basis_state(int n_atoms, int code);

  int n_atoms() const { return n_atoms_; }
  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  Complex amp(int code) const { return amps_(code); }

  Complex inner(const StateVector& other) const;
  double norm() const { return amps_.norm(); }

  // Equality up to a global phase.
  bool equals_up_to_phase(const StateVector& other, double tol = 1e-10) const;

 private:
  int n_atoms_;
  Vector amps_;
};

/// Mixed state; Hermitian, unit trace, positive semidefinite (tolerances per
/// construction checks).
class DensityMatrix {
 public:
  DensityMatrix(int n_atoms, Matrix entries);

  static DensityMatrix pure(const StateVector& psi);

  int n_atoms() const { return n_atoms_; }
  int dim() const { return static_cast<int>(rho_.rows()); }
  const Matrix& entries() const { return rho_; }

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  int n_atoms_;
  Matrix rho_;
};

struct OperatorMatrix {
  int n_atoms = 0;
  Matrix entries;
  bool hermitian = false;

  int dim() const { return static_cast<int>(entries.rows()); }
  double hermiticity_error() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }
};

// ---- state constructors ----

// Twisted Dicke state |D^N_a(phi)>: superposition of all weight-a codes with
// phase exp(i sum of site phases over excited atoms). a = 1 gives the twisted
// W state; all phases zero gives the ordinary Dicke state.
StateVector build_twisted_dicke(int n_atoms, int excitation,
                                std::span<const double> site_phases);

StateVector build_dicke(int n_atoms, int excitation);

// General W-type state (1/sqrt(A)) sum_n A_n |g..r_n..g>; at least two
// nonzero amplitudes required.
StateVector build_general_w(std::span<const Complex> amplitudes);

// (|g..g> + e^{i phi} |r..r>)/sqrt(2)
StateVector build_ghz(int n_atoms, double relative_phase);

// The eight chirality eigenstates for N = 3; s in {-1, 0, +1}.
StateVector zeta_state(int excitation, int s);

// ---- structural operators ----

// Totally antisymmetric three-qubit Pauli combination; 8x8, N = 3 only.
// zeta_{1+} and zeta_{2+} have eigenvalue +1, their minus partners -1.
OperatorMatrix chirality_operator();

// Diagonal unitary multiplying each code by exp(i sum of phases over its
// excited atoms); maps Dicke states to their twisted counterparts.
OperatorMatrix twist_unitary(std::span<const double> site_phases);

// Connects equal-weight codes at Hamming distance two (one excitation moved
// between two atoms).
OperatorMatrix hd2_operator(int n_atoms);

// Subspace ladder operator: maps each weight-a code to the sum of weight-(a-1)
// codes reached by de-exciting one atom; annihilates all other weights.
// On Dicke states: sigma_a^- |D^N_a> = sqrt(a(N-a+1)) |D^N_{a-1}>.
OperatorMatrix sigma_minus(int n_atoms, int from_excitation);

// Diagonal 0/1 projector onto the weight-a subspace.
OperatorMatrix excitation_projector(int n_atoms, int a);

// ---- metrics ----

// |<target|psi>| for pure states; global-phase invariant.
double fidelity(const StateVector& state, const StateVector& target);

// sqrt(<target|rho|target>)
double fidelity(const DensityMatrix& state, const StateVector& target);

}  // namespace rydsim
