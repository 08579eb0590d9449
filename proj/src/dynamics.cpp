#include "rydsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rydsim/errors.hpp"

namespace rydsim {

double PulseSchedule::total_time() const {
  double t = 0.0;
  for (const auto& seg : segments) t += seg.duration;
  return t;
}

int PulseSchedule::n_drives() const {
  return segments.empty() ? 0 : static_cast<int>(segments.front().rabis.size());
}

std::span<const Complex> PulseSchedule::rabis_at(double t) const {
  double start = 0.0;
  for (const auto& seg : segments) {
    if (t < start + seg.duration) return seg.rabis;
    start += seg.duration;
  }
  return segments.back().rabis;
}

void PulseSchedule::validate() const {
  if (segments.empty()) throw ConfigurationError("empty pulse schedule");
  const size_t drives = segments.front().rabis.size();
  for (const auto& seg : segments) {
    if (seg.duration <= 0.0) {
      throw ConfigurationError("segment durations must be positive");
    }
    if (seg.rabis.size() != drives) {
      throw ConfigurationError("segments disagree on the number of drives");
    }
  }
}

double pulse_energy(const PulseSchedule& schedule) {
  double a = 0.0;
  for (const auto& seg : schedule.segments) {
    double sum = 0.0;
    for (const Complex& r : seg.rabis) sum += std::norm(r);
    a += seg.duration * sum;
  }
  return a;
}

int StepControl::steps_for(double total_time, double fastest_frequency) const {
  const double periods = fastest_frequency * total_time / (2.0 * kPi);
  const double needed = steps_per_period * periods;
  return std::max(min_steps, static_cast<int>(std::ceil(needed)));
}

std::pair<double, double> RunResult::peak_fidelity(
    const std::string& name) const {
  const auto& trace = fidelities.at(name);
  size_t best = 0;
  for (size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[best]) best = i;
  }
  return {times[best], trace[best]};
}

std::vector<Matrix> lindblad_operators(int n_atoms, const NoiseModel& noise) {
  const int dim = basis_dim(n_atoms);
  std::vector<Matrix> ops;
  if (noise.gamma_decay > 0.0) {
    Matrix l = Matrix::Zero(dim, dim);
    for (int code = 0; code < dim; ++code) {
      for (int n = 0; n < n_atoms; ++n) {
        if (code & (1 << n)) l(code & ~(1 << n), code) += 1.0;
      }
    }
    ops.push_back(std::sqrt(noise.gamma_decay) * l);
  }
  if (noise.gamma_dephase > 0.0) {
    Matrix l = Matrix::Zero(dim, dim);
    for (int code = 0; code < dim; ++code) {
      // sum_n (|g><g| - |r><r|)_n is diagonal: (#ground - #excited)
      l(code, code) = n_atoms - 2 * excitation_number(code);
    }
    ops.push_back(std::sqrt(noise.gamma_dephase) * l);
  }
  return ops;
}

namespace {

struct SegmentPlan {
  double start = 0.0;
  double duration = 0.0;
  int n_steps = 0;
  int record_every = 0;  // steps between recorded points
};

std::vector<SegmentPlan> make_plan(const PulseSchedule& schedule,
                                   const StepControl& control,
                                   double fastest_frequency, int refine) {
  const double total = schedule.total_time();
  std::vector<SegmentPlan> plan;
  double start = 0.0;
  for (const auto& seg : schedule.segments) {
    SegmentPlan p;
    p.start = start;
    p.duration = seg.duration;
    const int records = std::max(
        1, static_cast<int>(std::lround(control.record_points * seg.duration /
                                        total)));
    int steps = control.steps_for(seg.duration, fastest_frequency);
    // Round steps up to a multiple of the record count so recorded times are
    // identical across step-refined reruns.
    steps = records * ((steps + records - 1) / records);
    p.n_steps = steps * refine;
    p.record_every = (steps / records) * refine;
    plan.push_back(p);
    start += seg.duration;
  }
  return plan;
}

// Precomputed drive evaluation: h = static + sum_j c_j(t) R_j + h.c.
struct Evaluator {
  const HamiltonianModel& model;
  std::vector<Matrix> lowering;

  explicit Evaluator(const HamiltonianModel& m) : model(m) {
    for (const auto& r : m.raising) lowering.push_back(r.adjoint());
  }

  void evaluate_into(double t, std::span<const Complex> rabis,
                     Matrix& h) const {
    h = model.static_part;
    for (size_t j = 0; j < model.raising.size(); ++j) {
      if (rabis[j] == Complex(0.0)) continue;
      const Complex c = rabis[j] * std::polar(1.0, -model.mod_freqs[j] * t);
      h.noalias() += c * model.raising[j];
      h.noalias() += std::conj(c) * lowering[j];
    }
  }
};

void record_populations(RunResult& result, int n_atoms,
                        const std::function<double(int)>& weight) {
  std::vector<double> pops(n_atoms + 1, 0.0);
  const int dim = basis_dim(n_atoms);
  for (int code = 0; code < dim; ++code) {
    pops[excitation_number(code)] += weight(code);
  }
  result.populations.push_back(std::move(pops));
}

void record_pure(RunResult& result, int n_atoms, double t, const Vector& psi,
                 std::span<const NamedTarget> targets) {
  result.times.push_back(t);
  record_populations(result, n_atoms,
                     [&psi](int code) { return std::norm(psi(code)); });
  for (const auto& target : targets) {
    result.fidelities[target.name].push_back(
        std::abs(target.state_at(t).amplitudes().dot(psi)));
  }
}

void record_density(RunResult& result, int n_atoms, double t,
                    const Matrix& rho, std::span<const NamedTarget> targets) {
  result.times.push_back(t);
  record_populations(result, n_atoms, [&rho](int code) {
    return rho(code, code).real();
  });
  for (const auto& target : targets) {
    const StateVector target_state = target.state_at(t);
    const Vector& v = target_state.amplitudes();
    const Complex q = v.adjoint() * rho * v;
    result.fidelities[target.name].push_back(std::sqrt(std::max(0.0, q.real())));
  }
}

RunResult run_pure_once(const HamiltonianModel& model,
                        const PulseSchedule& schedule, const StateVector& psi0,
                        const StepControl& control,
                        std::span<const NamedTarget> targets, int refine) {
  const auto plan =
      make_plan(schedule, control, model.fastest_frequency(), refine);
  RunResult result;
  result.pulse_energy = pulse_energy(schedule);

  const Evaluator eval(model);
  const int dim = model.dim();
  Matrix h0(dim, dim), h1(dim, dim), h2(dim, dim);
  Vector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  Vector psi = psi0.amplitudes();
  record_pure(result, model.n_atoms, 0.0, psi, targets);

  const Complex mi(0.0, -1.0);
  for (size_t s = 0; s < plan.size(); ++s) {
    const auto& p = plan[s];
    const auto& rabis = schedule.segments[s].rabis;
    const double h = p.duration / p.n_steps;
    for (int i = 0; i < p.n_steps; ++i) {
      const double t = p.start + i * h;
      eval.evaluate_into(t, rabis, h0);
      eval.evaluate_into(t + 0.5 * h, rabis, h1);
      eval.evaluate_into(t + h, rabis, h2);
      k1.noalias() = mi * (h0 * psi);
      tmp.noalias() = psi + (0.5 * h) * k1;
      k2.noalias() = mi * (h1 * tmp);
      tmp.noalias() = psi + (0.5 * h) * k2;
      k3.noalias() = mi * (h1 * tmp);
      tmp.noalias() = psi + h * k3;
      k4.noalias() = mi * (h2 * tmp);
      psi.noalias() += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if ((i + 1) % p.record_every == 0) {
        result.norm_drift =
            std::max(result.norm_drift, std::abs(psi.norm() - 1.0));
        record_pure(result, model.n_atoms, p.start + (i + 1) * h, psi,
                    targets);
      }
    }
  }
  result.norm_drift = std::max(result.norm_drift, std::abs(psi.norm() - 1.0));
  result.final_state = StateVector(psi0.n_atoms(), psi);
  return result;
}

RunResult run_lindblad_once(const HamiltonianModel& model,
                            const PulseSchedule& schedule,
                            const DensityMatrix& rho0, const NoiseModel& noise,
                            const StepControl& control,
                            std::span<const NamedTarget> targets, int refine) {
  const auto plan =
      make_plan(schedule, control, model.fastest_frequency(), refine);
  RunResult result;
  result.pulse_energy = pulse_energy(schedule);

  const auto ls = lindblad_operators(model.n_atoms, noise);
  std::vector<Matrix> ldag_l;
  for (const auto& l : ls) ldag_l.push_back(l.adjoint() * l);

  const Evaluator eval(model);
  const int dim = model.dim();
  Matrix h0(dim, dim), h1(dim, dim), h2(dim, dim);
  Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim);
  Matrix tmp(dim, dim), scratch(dim, dim);

  auto derivative = [&](const Matrix& ht, const Matrix& rho, Matrix& out) {
    out.noalias() = Complex(0.0, -1.0) * (ht * rho);
    out.noalias() += Complex(0.0, 1.0) * (rho * ht);
    for (size_t l = 0; l < ls.size(); ++l) {
      scratch.noalias() = ls[l] * rho;
      out.noalias() += scratch * ls[l].adjoint();
      out.noalias() -= 0.5 * (ldag_l[l] * rho);
      out.noalias() -= 0.5 * (rho * ldag_l[l]);
    }
  };

  Matrix rho = rho0.entries();
  record_density(result, model.n_atoms, 0.0, rho, targets);

  for (size_t s = 0; s < plan.size(); ++s) {
    const auto& p = plan[s];
    const auto& rabis = schedule.segments[s].rabis;
    const double h = p.duration / p.n_steps;
    for (int i = 0; i < p.n_steps; ++i) {
      const double t = p.start + i * h;
      eval.evaluate_into(t, rabis, h0);
      eval.evaluate_into(t + 0.5 * h, rabis, h1);
      eval.evaluate_into(t + h, rabis, h2);
      derivative(h0, rho, k1);
      tmp = rho + (0.5 * h) * k1;
      derivative(h1, tmp, k2);
      tmp = rho + (0.5 * h) * k2;
      derivative(h1, tmp, k3);
      tmp = rho + h * k3;
      derivative(h2, tmp, k4);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const bool record = (i + 1) % p.record_every == 0;
      if (record) {
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        result.hermiticity_drift = std::max(result.hermiticity_drift, herm);
      }
      tmp = rho.adjoint();
      rho = 0.5 * (rho + tmp);
      if (record) {
        result.trace_drift = std::max(
            result.trace_drift, std::abs(rho.trace().real() - 1.0) +
                                    std::abs(rho.trace().imag()));
        record_density(result, model.n_atoms, p.start + (i + 1) * h, rho,
                       targets);
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-5) {
    throw IntegrationError("density matrix developed a negative eigenvalue " +
                           std::to_string(es.eigenvalues().minCoeff()));
  }
  result.final_density = DensityMatrix(rho0.n_atoms(), rho);
  return result;
}

double compare_runs(const RunResult& coarse, const RunResult& fine) {
  double max_change = 0.0;
  for (size_t i = 0; i < coarse.times.size(); ++i) {
    for (size_t a = 0; a < coarse.populations[i].size(); ++a) {
      max_change = std::max(
          max_change,
          std::abs(coarse.populations[i][a] - fine.populations[i][a]));
    }
  }
  for (const auto& [name, trace] : coarse.fidelities) {
    const auto& other = fine.fidelities.at(name);
    for (size_t i = 0; i < trace.size(); ++i) {
      max_change = std::max(max_change, std::abs(trace[i] - other[i]));
    }
  }
  return max_change;
}

// Runs at successively halved steps until both the halving comparison and the
// drift predicate accept the finer run.
template <typename RunOnce, typename DriftOk>
RunResult run_with_refinement(const StepControl& control, RunOnce&& run_once,
                              DriftOk&& drift_ok, const char* drift_label) {
  RunResult coarse = run_once(1);
  if (!control.halving_check) {
    if (!drift_ok(coarse)) {
      throw IntegrationError(std::string(drift_label) +
                             " drift out of tolerance; refine the step size");
    }
    return coarse;
  }
  for (int attempt = 0;; ++attempt) {
    RunResult fine = run_once(2 << attempt);
    fine.halving_max_change = compare_runs(coarse, fine);
    if (fine.halving_max_change <= control.halving_tol && drift_ok(fine)) {
      return fine;
    }
    if (attempt >= control.max_refinements) {
      const bool halving_bad = fine.halving_max_change > control.halving_tol;
      throw IntegrationError(
          "convergence failed after " + std::to_string(attempt + 1) +
          " refinements: " +
          (halving_bad ? "halving change " +
                             std::to_string(fine.halving_max_change)
                       : std::string(drift_label) +
                             " drift out of tolerance"));
    }
    coarse = std::move(fine);
  }
}

}  // namespace

RunResult evolve_pure(const HamiltonianModel& model,
                      const PulseSchedule& schedule, const StateVector& psi0,
                      const StepControl& control,
                      std::span<const NamedTarget> targets) {
  schedule.validate();
  if (schedule.n_drives() != model.n_drives()) {
    throw std::invalid_argument("schedule drive count differs from model");
  }
  return run_with_refinement(
      control,
      [&](int refine) {
        return run_pure_once(model, schedule, psi0, control, targets, refine);
      },
      [](const RunResult& r) { return r.norm_drift < 1e-9; }, "norm");
}

RunResult evolve_lindblad(const HamiltonianModel& model,
                          const PulseSchedule& schedule,
                          const DensityMatrix& rho0, const NoiseModel& noise,
                          const StepControl& control,
                          std::span<const NamedTarget> targets) {
  schedule.validate();
  if (schedule.n_drives() != model.n_drives()) {
    throw std::invalid_argument("schedule drive count differs from model");
  }
  return run_with_refinement(
      control,
      [&](int refine) {
        return run_lindblad_once(model, schedule, rho0, noise, control,
                                 targets, refine);
      },
      [](const RunResult& r) { return r.trace_drift < 1e-7; }, "trace");
}

}  // namespace rydsim
