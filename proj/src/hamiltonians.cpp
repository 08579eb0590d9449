#include "rydsim/hamiltonians.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rydsim/errors.hpp"

namespace rydsim {

namespace {

// Per-code accumulated phase sum(phases over excited atoms); empty phase
// arrays count as all-zero.
Eigen::VectorXd code_phases(int n_atoms, std::span<const double> phases) {
  const int dim = basis_dim(n_atoms);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  if (phases.empty()) return theta;
  if (phases.size() != static_cast<size_t>(n_atoms)) {
    throw std::invalid_argument("site phase array length differs from N");
  }
  for (int code = 0; code < dim; ++code) {
    double t = 0.0;
    for (int n = 0; n < n_atoms; ++n) {
      if (code & (1 << n)) t += phases[n];
    }
    theta(code) = t;
  }
  return theta;
}

// U(phi) A U(phi)^dagger applied in place via the diagonal phase vector.
void conjugate_by_twist(Matrix& a, const Eigen::VectorXd& theta) {
  const int dim = static_cast<int>(a.rows());
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (a(i, j) != Complex(0.0)) {
        a(i, j) *= std::polar(1.0, theta(i) - theta(j));
      }
    }
  }
}

std::vector<double> zeros_if_empty(std::span<const double> phases, int n) {
  if (!phases.empty()) {
    if (phases.size() != static_cast<size_t>(n)) {
      throw std::invalid_argument("site phase array length differs from N");
    }
    return {phases.begin(), phases.end()};
  }
  return std::vector<double>(n, 0.0);
}

}  // namespace

EnergyShifts energy_shifts(double omega0_abs, double delta0, double v,
                           double denominator_floor) {
  EnergyShifts shifts;
  const double w2 = omega0_abs * omega0_abs;
  double* out[3] = {&shifts.s0, &shifts.s1, &shifts.s2};
  for (int a = 0; a < 3; ++a) {
    const double den = delta0 - a * v;
    if (std::abs(den) < denominator_floor) {
      throw SingularityError("energy-shift denominator Delta_0 - " +
                             std::to_string(a) + "V vanishes");
    }
    *out[a] = w2 / den;
  }
  return shifts;
}

OperatorMatrix h_atomic(int n_atoms, double omega_a,
                        const PotentialTable& potentials) {
  if (potentials.n_atoms() != n_atoms) {
    throw std::invalid_argument("potential table size differs from N");
  }
  const int dim = basis_dim(n_atoms);
  Matrix h = Matrix::Zero(dim, dim);
  for (int code = 0; code < dim; ++code) {
    double e = excitation_number(code) * omega_a;
    for (int p = 0; p < n_atoms; ++p) {
      for (int q = p + 1; q < n_atoms; ++q) {
        if ((code & (1 << p)) && (code & (1 << q))) e += potentials.v(p, q);
      }
    }
    h(code, code) = e;
  }
  return OperatorMatrix{n_atoms, std::move(h), true};
}

OperatorMatrix h_off_resonant(int n_atoms, const LaserField& field0, double v,
                              double denominator_floor) {
  const int dim = basis_dim(n_atoms);
  const double w2 = std::norm(field0.rabi);
  Matrix twisted_hd2 = hd2_operator(n_atoms).entries;
  conjugate_by_twist(twisted_hd2,
                     code_phases(n_atoms, field0.site_phases));

  Matrix h = Matrix::Zero(dim, dim);
  if (w2 == 0.0) return OperatorMatrix{n_atoms, std::move(h), true};

  const Matrix identity = Matrix::Identity(dim, dim);
  for (int a = 0; a <= n_atoms; ++a) {
    const double den_a = field0.coarse_detuning - a * v;
    const double den_am1 = field0.coarse_detuning - (a - 1) * v;
    if (std::abs(den_a) < denominator_floor ||
        std::abs(den_am1) < denominator_floor) {
      throw SingularityError("off-resonant denominator vanishes at a = " +
                             std::to_string(a));
    }
    const Matrix pa = excitation_projector(n_atoms, a).entries;
    const Matrix inner = (twisted_hd2 + (n_atoms - a) * identity) / den_a -
                         (twisted_hd2 + a * identity) / den_am1;
    h += w2 * pa * inner * pa;
  }
  return OperatorMatrix{n_atoms, std::move(h), true};
}

OperatorMatrix h_off_resonant_trimer(std::span<const double> site_phases0,
                                     const EnergyShifts& shifts) {
  const StateVector ggg = StateVector::basis_state(3, 0);
  const StateVector rrr = StateVector::basis_state(3, 7);
  const auto phases = zeros_if_empty(site_phases0, 3);
  const StateVector d1 = build_twisted_dicke(3, 1, phases);
  const StateVector d2 = build_twisted_dicke(3, 2, phases);

  Matrix h = Matrix::Zero(8, 8);
  h += 3.0 * shifts.s0 * ggg.amplitudes() * ggg.amplitudes().adjoint();
  h -= 3.0 * shifts.s2 * rrr.amplitudes() * rrr.amplitudes().adjoint();
  h += (-3.0 * shifts.s0 + 3.0 * shifts.s1) * d1.amplitudes() *
       d1.amplitudes().adjoint();
  h += (-3.0 * shifts.s1 + 3.0 * shifts.s2) * d2.amplitudes() *
       d2.amplitudes().adjoint();
  h += shifts.s1 * (excitation_projector(3, 1).entries -
                    excitation_projector(3, 2).entries);
  return OperatorMatrix{3, std::move(h), true};
}

OperatorMatrix h_resonant_step(int n_atoms, int a, const LaserField& field,
                               double v, double resonance_tol) {
  const double target = (a - 1) * v;
  if (std::abs(field.coarse_detuning - target) >
      resonance_tol * std::max(1.0, std::abs(v))) {
    throw ConfigurationError(
        "field " + std::to_string(field.label) + " is off the " +
        std::to_string(a) + "<->" + std::to_string(a - 1) + " resonance");
  }
  Matrix lower = sigma_minus(n_atoms, a).entries;
  conjugate_by_twist(lower, code_phases(n_atoms, field.site_phases));
  Matrix h = std::conj(field.rabi) * lower;
  h += h.adjoint().eval();
  return OperatorMatrix{n_atoms, std::move(h), true};
}

OperatorMatrix h_ladder(int n_atoms, std::span<const LaserField> fields,
                        double v, double resonance_tol) {
  if (fields.size() != static_cast<size_t>(n_atoms)) {
    throw std::invalid_argument("ladder needs one field per step (N fields)");
  }
  const int dim = basis_dim(n_atoms);
  Matrix h = Matrix::Zero(dim, dim);
  for (int a = 1; a <= n_atoms; ++a) {
    h += h_resonant_step(n_atoms, a, fields[a - 1], v, resonance_tol).entries;
  }
  return OperatorMatrix{n_atoms, std::move(h), true};
}

OperatorMatrix h_dicke_ladder(int n_atoms, std::span<const Complex> rabis) {
  if (rabis.size() != static_cast<size_t>(n_atoms)) {
    throw std::invalid_argument("need N Rabi values for the Dicke ladder");
  }
  const int dim = basis_dim(n_atoms);
  Matrix h = Matrix::Zero(dim, dim);
  for (int a = 1; a <= n_atoms; ++a) {
    const StateVector lo = build_dicke(n_atoms, a - 1);
    const StateVector hi = build_dicke(n_atoms, a);
    const double coeff = std::sqrt(static_cast<double>(a) * (n_atoms - a + 1));
    h += std::conj(rabis[a - 1]) * coeff * lo.amplitudes() *
         hi.amplitudes().adjoint();
  }
  h += h.adjoint().eval();
  return OperatorMatrix{n_atoms, std::move(h), true};
}

OperatorMatrix zeta_ladder(std::span<const Complex> rabis,
                           AlignmentCase which) {
  if (rabis.size() != 3) {
    throw std::invalid_argument("zeta ladder needs three Rabi values");
  }
  if (which == AlignmentCase::aligned) return h_dicke_ladder(3, rabis);

  const int s = (which == AlignmentCase::zeta_minus) ? -1 : +1;
  const StateVector ggg = StateVector::basis_state(3, 0);
  const StateVector rrr = StateVector::basis_state(3, 7);
  const StateVector z10 = zeta_state(1, 0);
  const StateVector z2 = zeta_state(2, s);

  Matrix h = Matrix::Zero(8, 8);
  h += std::sqrt(3.0) * std::conj(rabis[0]) * ggg.amplitudes() *
       z10.amplitudes().adjoint();
  h -= std::conj(rabis[1]) * z10.amplitudes() * z2.amplitudes().adjoint();
  h += std::sqrt(3.0) * std::conj(rabis[2]) * z2.amplitudes() *
       rrr.amplitudes().adjoint();
  h += h.adjoint().eval();
  return OperatorMatrix{3, std::move(h), true};
}

std::array<double, 3> fine_detunings(const EnergyShifts& shifts) {
  return {-6.0 * shifts.s0 + 4.0 * shifts.s1,
          3.0 * shifts.s0 - 8.0 * shifts.s1 + 3.0 * shifts.s2,
          4.0 * shifts.s1 - 6.0 * shifts.s2};
}

OperatorMatrix h_twisted_ladder(std::span<const double> site_phases0,
                                std::span<const LaserField> fields,
                                double sigma_floor) {
  if (fields.size() != 3) {
    throw std::invalid_argument("twisted ladder needs three fields");
  }
  const auto phases0 = zeros_if_empty(site_phases0, 3);

  Complex sigma[3];
  for (int a = 0; a < 3; ++a) {
    const auto pa = zeros_if_empty(fields[a].site_phases, 3);
    sigma[a] = sigma_overlap(pa, phases0);  // Sigma_{k0 - ka}
    if (std::abs(sigma[a]) < sigma_floor) {
      throw OrthogonalDriveError(
          "|Sigma| = " + std::to_string(std::abs(sigma[a])) + " for field " +
          std::to_string(a + 1) + ": fields address orthogonal states");
    }
  }

  double phase_sum0 = 0.0;
  for (double p : phases0) phase_sum0 += p;

  const StateVector d1 = build_twisted_dicke(3, 1, phases0);
  const StateVector d2 = build_twisted_dicke(3, 2, phases0);

  Vector ggg_t = Vector::Zero(8);
  ggg_t(0) = std::polar(1.0, std::arg(sigma[0]));
  Vector d2_t = std::polar(1.0, -std::arg(sigma[1])) * d2.amplitudes();
  Vector rrr_t = Vector::Zero(8);
  rrr_t(7) = std::polar(
      1.0, std::arg(sigma[1]) - std::arg(sigma[2]) + phase_sum0);

  Matrix h = Matrix::Zero(8, 8);
  h += std::sqrt(3.0) * fields[0].rabi * (std::abs(sigma[0]) / 3.0) * ggg_t *
       d1.amplitudes().adjoint();
  h += 2.0 * fields[1].rabi * (std::abs(sigma[1]) / 3.0) * d1.amplitudes() *
       d2_t.adjoint();
  h += std::sqrt(3.0) * fields[2].rabi * (std::abs(sigma[2]) / 3.0) * d2_t *
       rrr_t.adjoint();
  h += h.adjoint().eval();
  return OperatorMatrix{3, std::move(h), true};
}

std::vector<double> residual_frequencies(const EnergyShifts& shifts,
                                         std::span<const double, 3> detunings) {
  const double s0 = shifts.s0, s1 = shifts.s1, s2 = shifts.s2;
  const double d1 = detunings[0], d2 = detunings[1], d3 = detunings[2];
  return {-3.0 * s0 + s1 - d1,
          -2.0 * s1 - d2,
          3.0 * s0 - 5.0 * s1 - d2,
          -5.0 * s1 + 3.0 * s2 - d2,
          s1 - 3.0 * s2 - d3};
}

OperatorMatrix rotated_ladder_oracle(std::span<const double> site_phases0,
                                     std::span<const LaserField> fields,
                                     const EnergyShifts& shifts, double window,
                                     int n_samples) {
  if (fields.size() != 3) {
    throw std::invalid_argument("oracle needs three ladder fields");
  }
  if (window <= 0.0 || n_samples < 2) {
    throw std::invalid_argument("oracle needs a positive averaging window");
  }
  const OperatorMatrix h_off = h_off_resonant_trimer(site_phases0, shifts);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h_off.entries);
  const Matrix q = es.eigenvectors();
  const Eigen::VectorXd lam = es.eigenvalues();

  // Rising operators with the field twists applied.
  std::vector<Matrix> rising;
  for (int a = 1; a <= 3; ++a) {
    Matrix lower = sigma_minus(3, a).entries;
    conjugate_by_twist(lower, code_phases(3, fields[a - 1].site_phases));
    rising.push_back(lower.adjoint());
  }

  Matrix accum = Matrix::Zero(8, 8);
  const double dt = window / n_samples;
  for (int i = 0; i <= n_samples; ++i) {
    const double t = i * dt;
    Matrix hl = Matrix::Zero(8, 8);
    for (int a = 0; a < 3; ++a) {
      hl += fields[a].rabi *
            std::polar(1.0, -fields[a].fine_detuning * t) * rising[a];
    }
    hl += hl.adjoint().eval();

    Vector phase(8);
    for (int k = 0; k < 8; ++k) phase(k) = std::polar(1.0, lam(k) * t);
    const Matrix rot = q * phase.asDiagonal() * q.adjoint();
    const Matrix sample = rot * hl * rot.adjoint();
    accum += (i == 0 || i == n_samples) ? 0.5 * sample : sample;
  }
  accum /= static_cast<double>(n_samples);
  return OperatorMatrix{3, std::move(accum), true};
}

HierarchyReport hierarchy_check(const HierarchyParams& p) {
  const double n3 = p.n_principal * p.n_principal * p.n_principal;
  const double decay = p.kappa / n3;
  const double inv_t = 1.0 / p.t_int;
  const double level_spacing = p.ei_over_hbar / n3;

  HierarchyReport report;
  auto add = [&report](const std::string& name, double lhs, double rhs,
                       double required) {
    HierarchyLink link;
    link.name = name;
    link.lhs = lhs;
    link.rhs = rhs;
    link.ratio = lhs > 0.0 ? rhs / lhs : std::numeric_limits<double>::infinity();
    link.pass = link.ratio >= required;
    report.links.push_back(link);
  };
  add("decay << 1/T_int", decay, inv_t, p.margin);
  add("1/T_int <~ |g|", inv_t, std::abs(p.g), 1.0);
  add("|g| << |G|", std::abs(p.g), std::abs(p.big_g), p.margin);
  add("|G| << level spacing", std::abs(p.big_g), level_spacing, p.margin);

  report.all_pass = true;
  for (const auto& link : report.links) report.all_pass &= link.pass;
  return report;
}

double HamiltonianModel::fastest_frequency() const {
  double fastest = 0.0;
  for (double w : mod_freqs) fastest = std::max(fastest, std::abs(w));
  if (static_part.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(static_part);
    fastest = std::max(
        fastest, es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
  }
  return fastest;
}

Matrix HamiltonianModel::evaluate(double t,
                                  std::span<const Complex> rabis) const {
  if (rabis.size() != raising.size()) {
    throw std::invalid_argument("one Rabi value per drive required");
  }
  Matrix drive = Matrix::Zero(dim(), dim());
  for (size_t j = 0; j < raising.size(); ++j) {
    if (rabis[j] != Complex(0.0)) {
      drive += rabis[j] * std::polar(1.0, -mod_freqs[j] * t) * raising[j];
    }
  }
  Matrix h = static_part + drive;
  h += drive.adjoint();
  return h;
}

namespace {

HamiltonianModel make_model(int n_atoms, std::span<const LaserField> fields,
                            Matrix static_part, bool coarse) {
  HamiltonianModel model;
  model.n_atoms = n_atoms;
  model.static_part = std::move(static_part);
  for (size_t j = 0; j < fields.size(); ++j) {
    const int dim = basis_dim(n_atoms);
    const auto phases = zeros_if_empty(fields[j].site_phases, n_atoms);
    Matrix r = Matrix::Zero(dim, dim);
    for (int code = 0; code < dim; ++code) {
      for (int n = 0; n < n_atoms; ++n) {
        if (!(code & (1 << n))) {
          r(code | (1 << n), code) += std::polar(1.0, phases[n]);
        }
      }
    }
    model.raising.push_back(std::move(r));
    model.mod_freqs.push_back(coarse ? fields[j].coarse_detuning +
                                           fields[j].fine_detuning
                                     : fields[j].fine_detuning);
  }
  return model;
}

}  // namespace

HamiltonianModel full_driven_model(int n_atoms,
                                   std::span<const LaserField> fields,
                                   const PotentialTable& potentials) {
  Matrix blockade = h_atomic(n_atoms, 0.0, potentials).entries;
  return make_model(n_atoms, fields, std::move(blockade), true);
}

HamiltonianModel detuned_ladder_model(int n_atoms,
                                      std::span<const LaserField> fields,
                                      const OperatorMatrix& h_off) {
  return make_model(n_atoms, fields, h_off.entries, false);
}

}  // namespace rydsim
