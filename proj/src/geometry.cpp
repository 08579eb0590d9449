#include "rydsim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace rydsim {

AtomArray triangle_array(double side) {
  if (side <= 0.0) throw std::domain_error("triangle side must be positive");
  const double r = side / std::sqrt(3.0);
  // phi_2 = 0; atoms are stored as (atom 1, atom 2, atom 3).
  const double azimuth[3] = {4.0 * kPi / 3.0, 0.0, 2.0 * kPi / 3.0};
  AtomArray atoms;
  for (double phi : azimuth) {
    atoms.positions.emplace_back(r * std::cos(phi), r * std::sin(phi), 0.0);
  }
  return atoms;
}

std::vector<double> site_phases(const LaserAlignment& alignment,
                                const AtomArray& atoms) {
  const double s = std::sin(alignment.theta_k);
  const double c = std::cos(alignment.theta_k);
  const Eigen::Vector3d k =
      alignment.wavenumber *
      Eigen::Vector3d(s * std::cos(alignment.phi_k),
                      s * std::sin(alignment.phi_k), c);
  std::vector<double> phases;
  phases.reserve(atoms.positions.size());
  for (const auto& x : atoms.positions) phases.push_back(k.dot(x));
  return phases;
}

Complex sigma_overlap(std::span<const double> phases_a,
                      std::span<const double> phases_b) {
  if (phases_a.size() != phases_b.size()) {
    throw std::domain_error("phase arrays differ in length");
  }
  Complex sigma = 0.0;
  for (size_t n = 0; n < phases_a.size(); ++n) {
    sigma += std::polar(1.0, phases_b[n] - phases_a[n]);
  }
  return sigma;
}

PotentialTable potentials(const AtomArray& atoms, double v_ref, double d_ref) {
  if (v_ref <= 0.0 || d_ref <= 0.0) {
    throw std::domain_error("reference potential and distance must be positive");
  }
  const int n = atoms.n_atoms();
  PotentialTable table;
  table.v = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double d = atoms.distance(p, q);
      if (d <= 0.0) throw std::domain_error("coincident atoms");
      const double v = v_ref * std::pow(d_ref / d, 6);
      table.v(p, q) = v;
      table.v(q, p) = v;
    }
  }
  return table;
}

namespace {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : state_(mix(seed)), root_(seed) {}

RngStream::RngStream(std::uint64_t state, std::uint64_t root)
    : state_(state), root_(root) {}

RngStream RngStream::substream(std::uint64_t index) const {
  // Derived from the root seed only, so substreams are identical no matter
  // how far the parent has advanced.
  const std::uint64_t sub_seed = mix(root_ ^ mix(index + 0x632BE59BD9B4E019ULL));
  return RngStream(mix(sub_seed), sub_seed);
}

std::uint64_t RngStream::next_u64() { return splitmix64_next(state_); }

double RngStream::next_uniform() {
  // 53-bit mantissa, mapped to (0, 1] so log() below is safe.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * kPi * u2;
  cached_ = r * std::sin(phi);
  has_cached_ = true;
  return r * std::cos(phi);
}

AtomArray perturb(const AtomArray& atoms, double sigma, RngStream& rng) {
  if (sigma < 0.0) throw std::domain_error("sigma must be non-negative");
  AtomArray out = atoms;
  for (auto& x : out.positions) {
    for (int c = 0; c < 3; ++c) x(c) += sigma * rng.next_normal();
  }
  return out;
}

}  // namespace rydsim
