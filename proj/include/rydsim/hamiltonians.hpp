#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rydsim/geometry.hpp"
#include "rydsim/states.hpp"
#include "rydsim/types.hpp"

namespace rydsim {

/// One drive field. Rates are in units of 1/T with hbar = 1; site_phases hold
/// k_j . x_n per atom.
struct LaserField {
  Complex rabi = 0.0;
  double coarse_detuning = 0.0;  // Delta_j
  double fine_detuning = 0.0;    // delta_j
  std::vector<double> site_phases;
  int label = 0;
};

/// Light shifts s_a = |Omega_0|^2 / (Delta_0 - a V) for a = 0, 1, 2.
struct EnergyShifts {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  double s(int a) const { return a == 0 ? s0 : (a == 1 ? s1 : s2); }
};

// Shifts from the strong-field parameters; throws SingularityError when a
// denominator magnitude falls below `denominator_floor`.
EnergyShifts energy_shifts(double omega0_abs, double delta0, double v,
                           double denominator_floor = 1e-9);

// ---- static generators ----

// Diagonal atomic Hamiltonian: a * omega_a plus the pair sum of potentials
// over excited atoms (ground-state energy zero).
OperatorMatrix h_atomic(int n_atoms, double omega_a,
                        const PotentialTable& potentials);

// Static correction from a strong off-resonant field (general-N resolvent
// form, built from the twisted Hd2 operator per excitation sector).
OperatorMatrix h_off_resonant(int n_atoms, const LaserField& field0, double v,
                              double denominator_floor = 1e-9);

// Independent N = 3 transcription of the same correction as an explicit
// five-term sum over projectors and twisted Dicke states; used to cross-check
// h_off_resonant.
OperatorMatrix h_off_resonant_trimer(std::span<const double> site_phases0,
                                     const EnergyShifts& shifts);

// Single resonant step: Omega* U(phi) sigma_a^- U(phi)^dagger + h.c.
// Requires the field to sit on the a <-> a-1 resonance,
// Delta_a = (a - 1) V, within `resonance_tol` (relative to max(|V|, 1)).
OperatorMatrix h_resonant_step(int n_atoms, int a, const LaserField& field,
                               double v, double resonance_tol = 1e-9);

// Sum of resonant steps for fields a = 1..N (field a drives a <-> a-1).
OperatorMatrix h_ladder(int n_atoms, std::span<const LaserField> fields,
                        double v, double resonance_tol = 1e-9);

// (N+1)-level Dicke ladder with couplings sqrt(a(N-a+1)) Omega_a, embedded in
// the full 2^N space on the Dicke sector.
OperatorMatrix h_dicke_ladder(int n_atoms, std::span<const Complex> rabis);

enum class AlignmentCase { aligned, zeta_minus, zeta_plus };

// Four-level ladder over chirality eigenstates (N = 3). `aligned` couples
// |ggg> - zeta_10 - zeta_20 - |rrr> with Dicke coefficients; the zeta_minus
// (zeta_plus) case routes the a = 2 rung through zeta_2- (zeta_2+) with a
// -Omega_2 coupling of unit weight.
OperatorMatrix zeta_ladder(std::span<const Complex> rabis, AlignmentCase which);

// ---- twisted-ladder machinery ----

// delta_1 = -6 s0 + 4 s1, delta_2 = 3 s0 - 8 s1 + 3 s2, delta_3 = 4 s1 - 6 s2.
std::array<double, 3> fine_detunings(const EnergyShifts& shifts);

// Static twisted-ladder Hamiltonian over the k_0-twisted states (with the
// coupling-phase conventions folded into the basis vectors so the couplings
// sqrt(3) Omega_1 |Sigma_01|/3, 2 Omega_2 |Sigma_02|/3,
// sqrt(3) Omega_3 |Sigma_03|/3 are real for real Omega_a).
// Throws OrthogonalDriveError when any |Sigma_0a| < sigma_floor.
OperatorMatrix h_twisted_ladder(std::span<const double> site_phases0,
                                std::span<const LaserField> fields,
                                double sigma_floor = 0.1);

// Residual oscillation frequencies of the terms not compensated by the fine
// detunings: the five combinations
//   {-3 s0 + s1 - d1, -2 s1 - d2, 3 s0 - 5 s1 - d2, -5 s1 + 3 s2 - d2,
//    s1 - 3 s2 - d3}.
std::vector<double> residual_frequencies(const EnergyShifts& shifts,
                                         std::span<const double, 3> detunings);

// Brute-force oracle: numerically averages
//   exp(+i H_off3(k0) t) H_L(t) exp(-i H_off3(k0) t)
// over t in [0, window] (trapezoid on n_samples + 1 points), where the rising
// part of H_L carries Omega_a exp(-i delta_a t). Converges to
// h_twisted_ladder as the window grows past 1/min|omega_R|.
OperatorMatrix rotated_ladder_oracle(std::span<const double> site_phases0,
                                     std::span<const LaserField> fields,
                                     const EnergyShifts& shifts, double window,
                                     int n_samples = 1 << 15);

// ---- timescale hierarchy ----

struct HierarchyParams {
  double kappa = 0.0;       // bound-state decay rate [1/s]
  double n_principal = 0;   // principal quantum number
  double g = 0.0;           // conversion Rabi scale [1/s]
  double big_g = 0.0;       // dressing (Stark) scale [1/s]
  double t_int = 0.0;       // pulse duration [s]
  double ei_over_hbar = 1e16;  // ionization energy / hbar [1/s]
  double margin = 10.0;        // required ratio for each "<<" link
};

struct HierarchyLink {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // rhs / lhs
  bool pass = false;
};

struct HierarchyReport {
  std::vector<HierarchyLink> links;
  bool all_pass = false;
};

// Evaluates kappa/n^3 << 1/T_int <~ |g| << |G| << E_I/(hbar n^3) with the
// configured margin on each strict link ("<~" uses margin 1).
HierarchyReport hierarchy_check(const HierarchyParams& params);

// ---- time-dependent model ----

/// Generator H(t) = static_part
///   + sum_j Omega_j(t) exp(-i mod_freq_j t) raising_j + h.c.
/// Full-driven (rotating-frame) models use mod_freq_j = Delta_j and a
/// blockade-diagonal static part; detuned-ladder models use mod_freq_j =
/// delta_j and the static off-resonant correction.
struct HamiltonianModel {
  int n_atoms = 0;
  Matrix static_part;
  std::vector<Matrix> raising;
  std::vector<double> mod_freqs;

  int dim() const { return static_cast<int>(static_part.rows()); }
  int n_drives() const { return static_cast<int>(raising.size()); }
  double fastest_frequency() const;
  Matrix evaluate(double t, std::span<const Complex> rabis) const;
};

// Rotating-frame driven model: raising_j = sum_n exp(i phi_jn) |r><g|_n,
// mod_freq_j = Delta_j + delta_j, static part = blockade pair sum. The
// `rabi` stored in each field is ignored (the schedule supplies it).
HamiltonianModel full_driven_model(int n_atoms,
                                   std::span<const LaserField> fields,
                                   const PotentialTable& potentials);

// Frame with the fast atomic dynamics removed: same raising operators,
// mod_freq_j = delta_j, static part = the off-resonant correction.
HamiltonianModel detuned_ladder_model(int n_atoms,
                                      std::span<const LaserField> fields,
                                      const OperatorMatrix& h_off);

}  // namespace rydsim
