#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rydsim/dynamics.hpp"
#include "rydsim/geometry.hpp"
#include "rydsim/hamiltonians.hpp"

namespace rydsim {

// Rotating GHZ target (|ggg> + exp(i(-3 v t + offset)) |rrr>)/sqrt(2): the
// -3 v t accounts for the blockade energy of |rrr> in the driven frame; the
// constant offset is the relative phase left by the constant-Rabi pulse.
NamedTarget ghz_target(std::string name, double v, double offset);

// ---- chiral W preparation ----

// pi-pulse preparation of |W(Phi)> on the d = 2 lambda_0 triangle with
// phi_k - phi_2 = pi/2 and theta_k = arcsin(Phi / 2 pi). Fidelity traces are
// recorded against "W_Phi" and "ground".
RunResult prepare_twisted_w(double phi, double v_over_hbar = 3000.0,
                            const StepControl& control = {});

struct FidelityCurveRow {
  double theta_k = 0.0;
  double f_zeta10 = 0.0;
  double f_zeta1plus = 0.0;
  double f_zeta1minus = 0.0;
};

// Analytic overlaps |<W(Phi)|zeta_1s>| = |1 + 2 cos(Phi - s 2 pi/3)| / 3 with
// Phi = 2 pi sin(theta_k); no propagation.
std::vector<FidelityCurveRow> prep_fidelity_curve(std::span<const double> thetas);

// ---- W -> GHZ conversion ----

enum class Pathway { zeta20, zeta2minus, zeta2plus };

Pathway pathway_from_string(const std::string& name);
std::string to_string(Pathway pathway);

// Run duration in units of the zeta20 conversion time T_plus; the
// zeta2-minus/plus pathways are stretched so the pulse energy matches.
double conversion_duration(Pathway pathway);

// Drives the three-field interaction Hamiltonian from |W_3> with the
// constant Rabi values; detunings (0, V, 2V) and V T_plus = v_t. Records the
// rotating "GHZ" fidelity plus fixed overlaps with the three a = 2 states.
// With nonzero noise the run uses the Lindblad propagator.
RunResult convert_w_to_ghz(Pathway pathway, const NoiseModel& noise = {},
                           double v_t = 3000.0,
                           const StepControl& control = {});

// ---- twisted-ladder prep + conversion pipeline ----

struct PipelineResult {
  RunResult run;
  double s_label = 0.0;
  double sigma_abs = 0.0;      // |Sigma_{k0 - kj}|
  double total_time = 0.0;     // in units of T_0
  double min_residual = 0.0;   // min |omega_R| T_0
  EnergyShifts shifts;
  std::array<double, 3> detunings{};
};

// pi-pulse |ggg> -> |D^3_1(k_0)> (first quarter) then constant-Rabi
// conversion to the twisted GHZ state, in the frame with the fast atomic
// dynamics removed. s = 3 sin(theta_k) in {0, 0.5, 0.75} gives
// |Sigma| in {3, 2, 1}; total time 9 T_0 / |Sigma|^2 at equal pulse energy.
PipelineResult twisted_ladder_pipeline(double s_label,
                                       const StepControl& control = {},
                                       double residual_floor = 500.0);

// ---- positional Monte Carlo ----

struct MonteCarloPoint {
  double sigma = 0.0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;   // sigma_F (population convention)
  double std_error = 0.0;      // sigma_F / sqrt(S)
  double sigma_d = 0.0;        // std of all 3S pair distances
  std::vector<double> fidelities;  // per sample, in sample order
};

struct MonteCarloSummary {
  std::vector<MonteCarloPoint> points;
  std::uint64_t seed = 0;
  int samples = 0;
};

// zeta20 conversion under random positional errors: per sample, perturb the
// d = 40 lambda_0 triangle, recompute the three V_pq (phases stay nominal),
// propagate, and record the GHZ fidelity at T_0. V T_0 = 30.86.
// Deterministic for a fixed seed regardless of n_threads (0 = all cores).
MonteCarloSummary positional_monte_carlo(std::span<const double> sigmas,
                                         int samples, std::uint64_t seed,
                                         int n_threads = 0,
                                         const StepControl& control = {});

}  // namespace rydsim
