#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rydsim/hamiltonians.hpp"
#include "rydsim/states.hpp"
#include "rydsim/types.hpp"

namespace rydsim {

/// Piecewise-constant drive values; one complex Rabi value per drive per
/// segment. Times are in units of the run time T.
struct PulseSegment {
  double duration = 0.0;
  std::vector<Complex> rabis;
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;

  double total_time() const;
  int n_drives() const;
  // Rabi values in effect at time t (right-continuous at boundaries).
  std::span<const Complex> rabis_at(double t) const;
  void validate() const;
};

// A(T) = integral of sum_j |Omega_j(t)|^2, exact for piecewise segments.
double pulse_energy(const PulseSchedule& schedule);

struct NoiseModel {
  double gamma_decay = 0.0;    // Gamma, collective |g><r| jump
  double gamma_dephase = 0.0;  // gamma, collective sigma_z dephasing
};

/// Step-size policy for the fixed-step integrator. Steps are chosen so the
/// fastest known frequency is resolved by at least `steps_per_period` steps;
/// `min_steps` bounds below for slow problems. Every run is re-integrated at
/// half the step and the recorded observables must agree to `halving_tol`.
struct StepControl {
  int steps_per_period = 40;
  int min_steps = 400;
  int record_points = 400;  // target number of recorded rows
  bool halving_check = true;
  double halving_tol = 1e-6;
  // When the halving check fails, the base step is halved and the check is
  // repeated, at most this many times (deterministic; the previous fine run
  // is reused as the new coarse run).
  int max_refinements = 4;

  int steps_for(double total_time, double fastest_frequency) const;
};

/// Fidelity target that may rotate in time (e.g. the GHZ target phase
/// -3 V t); evaluated at every recorded time.
struct NamedTarget {
  std::string name;
  std::function<StateVector(double)> state_at;
};

struct RunResult {
  std::vector<double> times;
  // populations[i][a] = <P_a> at times[i]
  std::vector<std::vector<double>> populations;
  std::map<std::string, std::vector<double>> fidelities;
  double pulse_energy = 0.0;
  double norm_drift = 0.0;       // pure runs
  double trace_drift = 0.0;      // Lindblad runs
  double hermiticity_drift = 0.0;
  double halving_max_change = 0.0;
  std::optional<StateVector> final_state;
  std::optional<DensityMatrix> final_density;

  double final_population(int a) const { return populations.back().at(a); }
  double final_fidelity(const std::string& name) const {
    return fidelities.at(name).back();
  }
  // (time, value) of the maximum of a fidelity trace.
  std::pair<double, double> peak_fidelity(const std::string& name) const;
};

// Integrates i dpsi/dt = H(t) psi with classical RK4; throws
// IntegrationError if norm drift exceeds 1e-9 or the halving check fails.
RunResult evolve_pure(const HamiltonianModel& model,
                      const PulseSchedule& schedule, const StateVector& psi0,
                      const StepControl& control,
                      std::span<const NamedTarget> targets = {});

// Integrates the master equation
//   drho/dt = -i[H, rho] + sum_l (L rho L^+ - {L^+ L, rho}/2)
// with L_1 = sqrt(Gamma) sum_n |g><r|_n and
// L_2 = sqrt(gamma) sum_n (|g><g| - |r><r|)_n. The density matrix is
// re-symmetrized each step (drift logged); trace drift above 1e-7 or a
// negative eigenvalue below -1e-5 raises IntegrationError.
RunResult evolve_lindblad(const HamiltonianModel& model,
                          const PulseSchedule& schedule,
                          const DensityMatrix& rho0, const NoiseModel& noise,
                          const StepControl& control,
                          std::span<const NamedTarget> targets = {});

// The two collective Lindblad operators for the given rates.
std::vector<Matrix> lindblad_operators(int n_atoms, const NoiseModel& noise);

}  // namespace rydsim
