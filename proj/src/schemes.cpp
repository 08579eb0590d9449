#include "rydsim/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rydsim/errors.hpp"

namespace rydsim {

namespace {

constexpr double kRabi1 = 1.22;  // sqrt(3) Omega_1 T_0
constexpr double kRabi2 = 1.42;  // 2 Omega_2 T_0
constexpr double kRabi3 = 2.35;  // sqrt(3) Omega_3 T_0

PotentialTable equal_potentials(double v) {
  return potentials(triangle_array(1.0), v, 1.0);
}

}  // namespace

NamedTarget ghz_target(std::string name, double v, double offset) {
  return NamedTarget{std::move(name), [v, offset](double t) {
                       return build_ghz(3, -3.0 * v * t + offset);
                     }};
}

RunResult prepare_twisted_w(double phi, double v_over_hbar,
                            const StepControl& control) {
  if (std::abs(phi) > 2.0 * kPi) {
    throw std::domain_error("|Phi| must not exceed 2 pi");
  }
  const double phi_pos = phi < 0.0 ? phi + 2.0 * kPi : phi;
  const LaserAlignment alignment{std::asin(phi_pos / (2.0 * kPi)),
                                 kPi / 2.0};
  const AtomArray atoms = triangle_array(2.0);
  const auto phases = site_phases(alignment, atoms);

  std::vector<LaserField> fields(1);
  fields[0].coarse_detuning = 0.0;
  fields[0].site_phases = phases;
  fields[0].label = 1;

  const HamiltonianModel model =
      full_driven_model(3, fields, potentials(atoms, v_over_hbar, 2.0));

  PulseSchedule schedule;
  schedule.segments.push_back(
      {1.0, {Complex(kPi / (2.0 * std::sqrt(3.0)), 0.0)}});

  const StateVector w_phi = build_twisted_dicke(3, 1, phases);
  const StateVector ground = StateVector::basis_state(3, 0);
  std::vector<NamedTarget> targets;
  targets.push_back({"W_Phi", [w_phi](double) { return w_phi; }});
  targets.push_back({"ground", [ground](double) { return ground; }});

  return evolve_pure(model, schedule, ground, control, targets);
}

std::vector<FidelityCurveRow> prep_fidelity_curve(
    std::span<const double> thetas) {
  std::vector<FidelityCurveRow> rows;
  rows.reserve(thetas.size());
  for (double theta : thetas) {
    if (theta < 0.0 || theta > kPi / 2.0) {
      throw std::domain_error("theta_k must lie in [0, pi/2]");
    }
    const double phi = 2.0 * kPi * std::sin(theta);
    FidelityCurveRow row;
    row.theta_k = theta;
    row.f_zeta10 = std::abs(1.0 + 2.0 * std::cos(phi)) / 3.0;
    row.f_zeta1plus = std::abs(1.0 + 2.0 * std::cos(phi - 2.0 * kPi / 3.0)) / 3.0;
    row.f_zeta1minus = std::abs(1.0 + 2.0 * std::cos(phi + 2.0 * kPi / 3.0)) / 3.0;
    rows.push_back(row);
  }
  return rows;
}

Pathway pathway_from_string(const std::string& name) {
  if (name == "zeta20") return Pathway::zeta20;
  if (name == "zeta2minus") return Pathway::zeta2minus;
  if (name == "zeta2plus") return Pathway::zeta2plus;
  throw ConfigurationError("unknown conversion pathway '" + name + "'");
}

std::string to_string(Pathway pathway) {
  switch (pathway) {
    case Pathway::zeta20: return "zeta20";
    case Pathway::zeta2minus: return "zeta2minus";
    case Pathway::zeta2plus: return "zeta2plus";
  }
  throw ConfigurationError("unknown conversion pathway");
}

namespace {

struct ConversionSetup {
  std::vector<LaserField> fields;
  PulseSchedule schedule;
  double duration = 0.0;
  double ghz_offset = 0.0;
};

ConversionSetup conversion_setup(Pathway pathway, double v) {
  const double o1 = kRabi1 / std::sqrt(3.0);
  const double o2 = kRabi2 / 2.0;
  const double o3 = kRabi3 / std::sqrt(3.0);
  const double energy20 = o1 * o1 + o2 * o2 + o3 * o3;

  ConversionSetup setup;
  setup.fields.resize(3);
  for (int j = 0; j < 3; ++j) {
    setup.fields[j].coarse_detuning = j * v;
    setup.fields[j].label = j + 1;
  }

  double r1 = o1, r2 = o2, r3 = o3;
  if (pathway == Pathway::zeta20) {
    setup.duration = 1.0;
    setup.ghz_offset = -kPi / 2.0;
  } else {
    // The a = 2 rung couples with unit (not double) weight, so Omega_2 is
    // doubled; stretching time by lambda and scaling all Rabi values by
    // 1/lambda restores the zeta20 pulse energy.
    r2 *= 2.0;
    const double lambda = (r1 * r1 + r2 * r2 + r3 * r3) / energy20;
    setup.duration = lambda;
    r1 /= lambda;
    r2 /= lambda;
    r3 /= lambda;
    setup.ghz_offset = kPi / 2.0;
    const double third = 2.0 * kPi / 3.0;
    const bool minus = pathway == Pathway::zeta2minus;
    // Field-2 twist mapping zeta_1-/+ onto zeta_10; field 3 compensates so the
    // a = 2 rung threads through zeta_2-/+.
    setup.fields[1].site_phases = minus
                                      ? std::vector<double>{third, 0.0, -third}
                                      : std::vector<double>{-third, 0.0, third};
    setup.fields[2].site_phases = minus
                                      ? std::vector<double>{-third, 0.0, third}
                                      : std::vector<double>{third, 0.0, -third};
  }
  setup.schedule.segments.push_back(
      {setup.duration, {Complex(r1), Complex(r2), Complex(r3)}});
  return setup;
}

}  // namespace

double conversion_duration(Pathway pathway) {
  return conversion_setup(pathway, 3000.0).duration;
}

RunResult convert_w_to_ghz(Pathway pathway, const NoiseModel& noise,
                           double v_t, const StepControl& control) {
  const double v = v_t;  // V T_plus = v_t with T_plus = 1
  const ConversionSetup setup = conversion_setup(pathway, v);
  const HamiltonianModel model =
      full_driven_model(3, setup.fields, equal_potentials(v));

  std::vector<NamedTarget> targets;
  targets.push_back(ghz_target("GHZ", v, setup.ghz_offset));
  for (int s : {0, -1, +1}) {
    const StateVector z = zeta_state(2, s);
    const std::string name =
        s == 0 ? "zeta20" : (s < 0 ? "zeta2minus" : "zeta2plus");
    targets.push_back({name, [z](double) { return z; }});
  }

  const StateVector w3 = zeta_state(1, 0);
  if (noise.gamma_decay == 0.0 && noise.gamma_dephase == 0.0) {
    return evolve_pure(model, setup.schedule, w3, control, targets);
  }
  return evolve_lindblad(model, setup.schedule, DensityMatrix::pure(w3), noise,
                         control, targets);
}

PipelineResult twisted_ladder_pipeline(double s_label,
                                       const StepControl& control,
                                       double residual_floor) {
  if (s_label < 0.0 || s_label >= 3.0) {
    throw ConfigurationError("s = 3 sin(theta_k) must lie in [0, 3)");
  }
  // T_0 s_0 = -1247 with Omega_0 = -0.03 Delta_0 and Delta_0 = -0.7 V fixes V.
  const double v = 1247.0 / 6.3e-4;
  const double delta0 = -0.7 * v;
  const EnergyShifts shifts = energy_shifts(0.03 * std::abs(delta0), delta0, v);
  const auto detunings = fine_detunings(shifts);

  const auto residuals = residual_frequencies(shifts, detunings);
  double min_residual = std::abs(residuals[0]);
  for (double r : residuals) min_residual = std::min(min_residual, std::abs(r));
  if (min_residual < residual_floor) {
    throw ConfigurationError(
        "min |omega_R| T_0 = " + std::to_string(min_residual) +
        " below the configured floor " + std::to_string(residual_floor));
  }

  const double phi = 2.0 * kPi * s_label / 3.0;
  const std::vector<double> phases0 = {-phi, 0.0, phi};
  const double sigma_abs = std::abs(1.0 + 2.0 * std::cos(phi));
  if (sigma_abs < 0.1) {
    throw OrthogonalDriveError("|Sigma| = " + std::to_string(sigma_abs) +
                               ": fields address orthogonal states");
  }

  std::vector<LaserField> fields(3);
  for (int j = 0; j < 3; ++j) {
    fields[j].fine_detuning = detunings[j];
    fields[j].label = j + 1;
  }
  const HamiltonianModel model =
      detuned_ladder_model(3, fields, h_off_resonant_trimer(phases0, shifts));

  const double total_time = 9.0 / (sigma_abs * sigma_abs);
  const double t_prep = total_time / 4.0;
  const double t_conv = total_time - t_prep;

  PulseSchedule schedule;
  schedule.segments.push_back(
      {t_prep,
       {Complex(2.0 * kPi * std::sqrt(3.0) / (sigma_abs * total_time)),
        Complex(0.0), Complex(0.0)}});
  schedule.segments.push_back(
      {t_conv,
       {Complex(kRabi1 * std::sqrt(3.0) / (sigma_abs * t_conv)),
        Complex(kRabi2 * 1.5 / (sigma_abs * t_conv)),
        Complex(kRabi3 * std::sqrt(3.0) / (sigma_abs * t_conv))}});

  PipelineResult result;
  result.s_label = s_label;
  result.sigma_abs = sigma_abs;
  result.total_time = total_time;
  result.min_residual = min_residual;
  result.shifts = shifts;
  result.detunings = detunings;
  result.run = evolve_pure(model, schedule, StateVector::basis_state(3, 0),
                           control, {});
  return result;
}

MonteCarloSummary positional_monte_carlo(std::span<const double> sigmas,
                                         int samples, std::uint64_t seed,
                                         int n_threads,
                                         const StepControl& control) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const double v = 30.86;
  const double d = 40.0;
  const AtomArray atoms = triangle_array(d);
  const ConversionSetup setup = conversion_setup(Pathway::zeta20, v);
  const StateVector w3 = zeta_state(1, 0);

  std::vector<NamedTarget> targets;
  targets.push_back(ghz_target("GHZ", v, setup.ghz_offset));

  StepControl sample_control = control;
  sample_control.record_points = std::min(control.record_points, 16);

  MonteCarloSummary summary;
  summary.seed = seed;
  summary.samples = samples;

  int threads = n_threads > 0
                    ? n_threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, samples));

  const RngStream root(seed);
  for (size_t si = 0; si < sigmas.size(); ++si) {
    const double sigma = sigmas[si];
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    std::vector<double> fidelities(samples, 0.0);
    std::vector<std::array<double, 3>> distances(samples);

    auto worker = [&](int begin, int end) {
      for (int i = begin; i < end; ++i) {
        // Substream index combines the sigma index and sample index so no
        // draws are shared between grid points.
        RngStream rng = root.substream(si * static_cast<size_t>(samples) + i);
        const AtomArray sample = perturb(atoms, sigma, rng);
        distances[i] = {sample.distance(0, 1), sample.distance(0, 2),
                        sample.distance(1, 2)};
        const HamiltonianModel model =
            full_driven_model(3, setup.fields, potentials(sample, v, d));
        const RunResult run =
            evolve_pure(model, setup.schedule, w3, sample_control, targets);
        fidelities[i] = run.final_fidelity("GHZ");
      }
    };

    if (threads == 1) {
      worker(0, samples);
    } else {
      std::vector<std::thread> pool;
      const int chunk = (samples + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(samples, begin + chunk);
        if (begin < end) pool.emplace_back(worker, begin, end);
      }
      for (auto& t : pool) t.join();
    }

    MonteCarloPoint point;
    point.sigma = sigma;
    double mean = 0.0;
    for (double f : fidelities) mean += f;
    mean /= samples;
    double var = 0.0;
    for (double f : fidelities) var += (f - mean) * (f - mean);
    var /= samples;
    point.mean_fidelity = mean;
    point.std_fidelity = std::sqrt(var);
    point.std_error = point.std_fidelity / std::sqrt(samples);

    double dmean = 0.0;
    for (const auto& trio : distances) {
      for (double dd : trio) dmean += dd;
    }
    dmean /= 3.0 * samples;
    double dvar = 0.0;
    for (const auto& trio : distances) {
      for (double dd : trio) dvar += (dd - dmean) * (dd - dmean);
    }
    dvar /= 3.0 * samples;
    point.sigma_d = std::sqrt(dvar);
    point.fidelities = std::move(fidelities);
    summary.points.push_back(std::move(point));
  }
  return summary;
}

}  // namespace rydsim
