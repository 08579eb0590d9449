// Acceptance gate: exercises the full preparation / conversion / robustness
// pipeline and prints one pass/fail line per criterion. Exits nonzero if any
// criterion fails.

#include <cmath>
#include <cstdio>
#include <future>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "rydsim/dynamics.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/geometry.hpp"
#include "rydsim/hamiltonians.hpp"
#include "rydsim/schemes.hpp"
#include "rydsim/states.hpp"

using namespace rydsim;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("%s - %2d. %s (%s)\n", pass ? "PASS" : "FAIL", index,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string num(double x) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.6g", x);
  return buffer;
}

// Step policy used for all propagated acceptance runs: resolve the fastest
// frequency finely enough that the first step-halving comparison already
// meets the 1e-6 observable tolerance.
StepControl acceptance_control() {
  StepControl control;
  control.steps_per_period = 640;
  control.max_refinements = 6;
  return control;
}

struct Hygiene {
  double norm_drift = 0.0;
  double trace_drift = 0.0;
  double halving = 0.0;
  int runs = 0;

  void absorb(const RunResult& run) {
    norm_drift = std::max(norm_drift, run.norm_drift);
    trace_drift = std::max(trace_drift, run.trace_drift);
    halving = std::max(halving, run.halving_max_change);
    ++runs;
  }
};

Hygiene g_hygiene;

PotentialTable equal_table(int n, double v) {
  PotentialTable table;
  table.v = Eigen::MatrixXd::Constant(n, n, v);
  table.v.diagonal().setZero();
  return table;
}

double max_matrix_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

bool structural_suite(std::string& detail) {
  bool ok = true;
  auto note = [&](bool pass, const std::string& what) {
    if (!pass) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  };

  // chirality spectrum and eigenbasis
  {
    const Matrix chi = chirality_operator().entries;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(chi);
    int minus = 0, zero = 0, plus = 0;
    for (int i = 0; i < 8; ++i) {
      const double v = solver.eigenvalues()(i);
      if (v < -0.5) ++minus;
      else if (v > 0.5) ++plus;
      else ++zero;
    }
    note(minus == 2 && zero == 4 && plus == 2, "chirality spectrum");
    bool eigen_ok = true;
    auto check_vec = [&](const StateVector& s, double value) {
      eigen_ok = eigen_ok &&
                 (chi * s.amplitudes() - value * s.amplitudes()).norm() < 1e-12;
    };
    for (int a : {1, 2}) {
      for (int s : {-1, 0, 1}) check_vec(zeta_state(a, s), s);
    }
    check_vec(StateVector::basis_state(3, 0), 0.0);
    check_vec(StateVector::basis_state(3, 7), 0.0);
    note(eigen_ok, "chirality eigenbasis");
  }

  // dual off-resonant constructions
  {
    LaserField field0;
    field0.rabi = 0.3;
    field0.coarse_detuning = -2.1;
    field0.site_phases = {0.4, -0.2, 1.3};
    const Matrix general = h_off_resonant(3, field0, 3.0).entries;
    const Matrix trimer =
        h_off_resonant_trimer(field0.site_phases,
                              energy_shifts(0.3, -2.1, 3.0))
            .entries;
    note(max_matrix_diff(general, trimer) < 1e-12, "dual off-resonant forms");

    const Matrix h_a = h_atomic(3, 5.0, equal_table(3, 3.0)).entries;
    note((h_a * general - general * h_a).cwiseAbs().maxCoeff() < 1e-10,
         "[H_A, H_off] = 0");
  }

  // aligned ladder preserves the twisted Dicke sector
  {
    const double v = 3.0;
    const std::vector<double> phases = {0.4, -0.2, 1.3};
    std::vector<LaserField> fields(3);
    for (int a = 1; a <= 3; ++a) {
      fields[a - 1].rabi = 0.1 * a;
      fields[a - 1].coarse_detuning = (a - 1) * v;
      fields[a - 1].site_phases = phases;
    }
    const Matrix h = h_ladder(3, fields, v).entries;
    Matrix p_dicke = Matrix::Zero(8, 8);
    for (int a = 0; a <= 3; ++a) {
      const Vector d = build_twisted_dicke(3, a, phases).amplitudes();
      p_dicke += d * d.adjoint();
    }
    const Matrix leak = (Matrix::Identity(8, 8) - p_dicke) * h * p_dicke;
    note(leak.cwiseAbs().maxCoeff() < 1e-12, "Dicke-sector invariance");
  }

  // collective ladder coefficients
  for (int n : {3, 4}) {
    bool coeff_ok = true;
    for (int a = 1; a <= n; ++a) {
      const Vector mapped =
          sigma_minus(n, a).entries * build_dicke(n, a).amplitudes();
      const Vector expected =
          std::sqrt(static_cast<double>(a) * (n - a + 1)) *
          build_dicke(n, a - 1).amplitudes();
      coeff_ok = coeff_ok && (mapped - expected).norm() < 1e-12;
    }
    note(coeff_ok, "ladder coefficients N=" + std::to_string(n));
  }

  // Lindblad propagator vs dense superoperator exponential
  {
    std::vector<LaserField> fields(1);
    const HamiltonianModel model =
        full_driven_model(3, fields, equal_table(3, 2.0));
    const Complex omega(0.8, 0.3);
    const Matrix h = model.evaluate(0.0, std::vector<Complex>{omega});
    NoiseModel noise;
    noise.gamma_decay = 0.35;
    noise.gamma_dephase = 0.15;

    const Matrix eye = Matrix::Identity(8, 8);
    Matrix super = Complex(0.0, -1.0) *
                   (Eigen::kroneckerProduct(eye, h).eval() -
                    Eigen::kroneckerProduct(h.transpose(), eye).eval());
    for (const Matrix& l : lindblad_operators(3, noise)) {
      const Matrix ldl = l.adjoint() * l;
      super += Eigen::kroneckerProduct(l.conjugate(), l).eval();
      super -= 0.5 * Eigen::kroneckerProduct(eye, ldl).eval();
      super -= 0.5 * Eigen::kroneckerProduct(ldl.transpose(), eye).eval();
    }
    const double t_final = 0.3;
    const StateVector psi0 = build_dicke(3, 1);
    const Matrix rho0 = DensityMatrix::pure(psi0).entries();
    const Matrix propagator = (super * t_final).exp();
    const Eigen::Map<const Vector> rho0_vec(rho0.data(), 64);
    const Vector rho_vec = propagator * rho0_vec;
    const Eigen::Map<const Matrix> rho_exact(rho_vec.data(), 8, 8);

    PulseSchedule schedule;
    schedule.segments.push_back({t_final, {omega}});
    const RunResult run =
        evolve_lindblad(model, schedule, DensityMatrix::pure(psi0), noise,
                        StepControl{});
    g_hygiene.absorb(run);
    note(run.final_density.has_value() &&
             max_matrix_diff(run.final_density->entries(), rho_exact) < 1e-7,
         "superoperator-exponential cross-check");
  }

  if (ok) detail = "all structural oracles agree";
  return ok;
}

}  // namespace

int main() {
  const StepControl control = acceptance_control();

  // 1. chiral W preparation
  {
    const RunResult run = prepare_twisted_w(2.0 * kPi / 3.0, 3000.0, control);
    g_hygiene.absorb(run);
    const double f = fidelity(*run.final_state, zeta_state(1, 1));
    report(1, "chiral W preparation fidelity vs zeta_1+", f >= 0.99,
           "F = " + num(f));
  }

  // 2. analytic preparation fidelity curve
  {
    const std::vector<double> thetas = {std::asin(1.0 / 3.0),
                                        std::asin(2.0 / 3.0), 0.0};
    const auto rows = prep_fidelity_curve(thetas);
    const double e1 = std::abs(rows[0].f_zeta1plus - 1.0);
    const double e2 = std::abs(rows[1].f_zeta1minus - 1.0);
    const double e3 = std::abs(rows[2].f_zeta10 - 1.0);
    const double worst = std::max({e1, e2, e3});
    report(2, "preparation fidelity curve peaks", worst < 1e-10,
           "max deviation " + num(worst));
  }

  // 3 & 4. unitary conversion pathways
  RunResult zeta20 = convert_w_to_ghz(Pathway::zeta20, NoiseModel{}, 3000.0,
                                      control);
  RunResult zeta2minus = convert_w_to_ghz(Pathway::zeta2minus, NoiseModel{},
                                          3000.0, control);
  g_hygiene.absorb(zeta20);
  g_hygiene.absorb(zeta2minus);
  {
    const double f = zeta20.final_fidelity("GHZ");
    double max_pop = 0.0;
    for (const std::string& name : {"zeta2minus", "zeta2plus"}) {
      for (double overlap : zeta20.fidelities.at(name)) {
        max_pop = std::max(max_pop, overlap * overlap);
      }
    }
    report(3, "zeta_20 pathway GHZ fidelity and dark chiral states",
           f >= 0.99 && max_pop < 1e-3,
           "F = " + num(f) + ", max chiral population " + num(max_pop));
  }
  {
    const auto [t20, f20] = zeta20.peak_fidelity("GHZ");
    const auto [t2m, f2m] = zeta2minus.peak_fidelity("GHZ");
    const double energy_gap =
        std::abs(zeta20.pulse_energy - zeta2minus.pulse_energy);
    report(4, "pathway ordering at equal pulse energy",
           energy_gap < 1e-12 && t2m > t20,
           "energy gap " + num(energy_gap) + ", peak times " + num(t20) +
               " vs " + num(t2m) + ", ratio " + num(t2m / t20));
  }

  // 5. open-system ordering
  {
    NoiseModel noise;
    noise.gamma_decay = 0.1;
    noise.gamma_dephase = 0.1;
    const RunResult open20 =
        convert_w_to_ghz(Pathway::zeta20, noise, 3000.0, control);
    const RunResult open2m =
        convert_w_to_ghz(Pathway::zeta2minus, noise, 3000.0, control);
    g_hygiene.absorb(open20);
    g_hygiene.absorb(open2m);
    const double u20 = zeta20.final_fidelity("GHZ");
    const double u2m = zeta2minus.final_fidelity("GHZ");
    const double o20 = open20.final_fidelity("GHZ");
    const double o2m = open2m.final_fidelity("GHZ");
    report(5, "open-system runs stay below unitary, faster pathway wins",
           o20 < u20 && o2m < u2m && o20 > o2m,
           "open F = " + num(o20) + " / " + num(o2m) + ", unitary F = " +
               num(u20) + " / " + num(u2m));
  }

  // 6. positional Monte Carlo robustness
  {
    const std::vector<double> sigmas = {0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
    StepControl mc_control = control;
    mc_control.record_points = 8;
    // These short runs converge within the refinement loop from the default
    // base resolution; starting finer only adds cost.
    mc_control.steps_per_period = 40;
    const MonteCarloSummary mc =
        positional_monte_carlo(sigmas, 500, 1, 0, mc_control);
    bool pass = true;
    double worst_mean = 1.0;
    std::string errors;
    for (const auto& point : mc.points) {
      pass = pass && point.mean_fidelity > 0.9;
      worst_mean = std::min(worst_mean, point.mean_fidelity);
      if (!errors.empty()) errors += " ";
      errors += num(point.std_error);
    }
    report(6, "Monte Carlo mean GHZ fidelity across the sigma grid", pass,
           "worst mean " + num(worst_mean) + ", standard errors " + errors);
  }

  // 7. twisted-ladder pipeline for |Sigma| = 3, 2, 1
  {
    StepControl pipeline_control = control;
    auto launch = [&pipeline_control](double s) {
      return std::async(std::launch::async, [s, &pipeline_control] {
        return twisted_ladder_pipeline(s, pipeline_control);
      });
    };
    auto f0 = launch(0.0);
    auto f1 = launch(0.5);
    auto f2 = launch(0.75);
    const PipelineResult r0 = f0.get();
    const PipelineResult r1 = f1.get();
    const PipelineResult r2 = f2.get();
    g_hygiene.absorb(r0.run);
    g_hygiene.absorb(r1.run);
    g_hygiene.absorb(r2.run);

    bool pops_ok = true;
    std::string pops;
    for (const PipelineResult* r : {&r0, &r1, &r2}) {
      const double p0 = r->run.final_population(0);
      const double p3 = r->run.final_population(3);
      pops_ok = pops_ok && std::abs(p0 - 0.5) <= 0.02 &&
                std::abs(p3 - 0.5) <= 0.02;
      if (!pops.empty()) pops += " ";
      pops += num(p0) + "/" + num(p3);
    }
    const bool times_ok =
        std::abs(r1.total_time / r0.total_time - 9.0 / 4.0) < 1e-12 &&
        std::abs(r2.total_time / r0.total_time - 9.0) < 1e-12;
    report(7, "pipeline populations 0.5 +/- 0.02 with 1 : 9/4 : 9 times",
           pops_ok && times_ok, "P0/P3 = " + pops);
  }

  // 8. effective-theory oracle
  {
    const double v = 1247.0 / 6.3e-4;
    const EnergyShifts shifts = energy_shifts(0.021 * v, -0.7 * v, v);
    const auto detunings = fine_detunings(shifts);
    const auto residuals = residual_frequencies(shifts, detunings);
    double min_residual = std::abs(residuals[0]);
    for (double r : residuals) min_residual = std::min(min_residual, std::abs(r));

    const double phi = 2.0 * kPi * 0.5 / 3.0;
    const std::vector<double> phases0 = {-phi, 0.0, phi};
    std::vector<LaserField> fields(3);
    for (int a = 0; a < 3; ++a) {
      fields[a].rabi = 1.5;
      fields[a].fine_detuning = detunings[a];
    }
    const Matrix ladder = h_twisted_ladder(phases0, fields).entries;
    const Matrix averaged =
        rotated_ladder_oracle(phases0, fields, shifts, 1.0).entries;

    const Vector ggg = StateVector::basis_state(3, 0).amplitudes();
    const Vector rrr = StateVector::basis_state(3, 7).amplitudes();
    const Vector d1 = build_twisted_dicke(3, 1, phases0).amplitudes();
    const Vector d2 = build_twisted_dicke(3, 2, phases0).amplitudes();
    double worst_rel = 0.0;
    const std::vector<std::pair<Vector, Vector>> pairs = {
        {ggg, d1}, {d1, d2}, {d2, rrr}};
    for (const auto& [lo, hi] : pairs) {
      const double expected = std::abs(lo.dot(ladder * hi));
      const double measured = std::abs(lo.dot(averaged * hi));
      worst_rel = std::max(worst_rel,
                           std::abs(measured - expected) / expected);
    }
    const bool shifts_ok = std::abs(shifts.s0 + 1247.0) < 1e-6;
    report(8, "time-averaged rotated frame matches the twisted ladder",
           worst_rel < 0.02 && shifts_ok,
           "worst coupling deviation " + num(100.0 * worst_rel) +
               "%, s_0 T_0 = " + num(shifts.s0) + ", min |omega_R| T_0 = " +
               num(min_residual));
  }

  // 9. structural property suite
  {
    std::string detail;
    const bool ok = structural_suite(detail);
    report(9, "structural property suite", ok, detail);
  }

  // 10. numerical hygiene across all recorded runs
  {
    const bool ok = g_hygiene.norm_drift < 1e-9 &&
                    g_hygiene.trace_drift < 1e-7 &&
                    g_hygiene.halving < 1e-6;
    report(10, "numerical hygiene on every acceptance run", ok,
           "norm drift " + num(g_hygiene.norm_drift) + ", trace drift " +
               num(g_hygiene.trace_drift) + ", halving change " +
               num(g_hygiene.halving) + " over " +
               std::to_string(g_hygiene.runs) +
               " direct runs (Monte Carlo samples enforce the same bounds "
               "internally)");
  }

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 acceptance criteria passed\n");
  return 0;
}
