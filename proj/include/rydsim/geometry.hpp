#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rydsim/types.hpp"

namespace rydsim {

/// Atom positions in units of the resonance wavelength lambda_0.
struct AtomArray {
  std::vector<Eigen::Vector3d> positions;

  int n_atoms() const { return static_cast<int>(positions.size()); }
  double distance(int p, int q) const {
    return (positions[p] - positions[q]).norm();
  }
};

/// Plane-wave propagation direction. theta_k is the angle between the
/// propagation direction and the atomic plane (z = 0); phi_k is the azimuth of
/// its in-plane projection. The wavenumber is 2*pi/lambda_0; the detuning
/// correction (1 + Delta/omega_A) is dropped since |Delta| << omega_A.
struct LaserAlignment {
  double theta_k = 0.0;
  double phi_k = 0.0;
  double wavenumber = 2.0 * kPi;
};

/// Symmetric table of pairwise interaction energies in units of 1/T.
struct PotentialTable {
  Eigen::MatrixXd v;  // v(p, q) = v(q, p); diagonal zero

  int n_atoms() const { return static_cast<int>(v.rows()); }
};

// Three atoms on a circle of radius side/sqrt(3) in the z = 0 plane. The
// azimuths obey phi_1 - phi_2 = 4*pi/3 and phi_3 - phi_2 = 2*pi/3, with
// phi_2 = 0 fixed by convention (only azimuth differences are physical).
AtomArray triangle_array(double side);

// Phases k . x_n for each atom, with k built from the alignment. For the
// canonical triangle this reduces to
//   phi_n = (2*pi) (d/sqrt(3)) sin(theta_k) cos(phi_k - phi_n).
std::vector<double> site_phases(const LaserAlignment& alignment,
                                const AtomArray& atoms);

// Sigma = sum_n exp(i (phi_b,n - phi_a,n)), the twisted-state overlap sum
// between two field alignments; |Sigma| ranges over [0, N].
Complex sigma_overlap(std::span<const double> phases_a,
                      std::span<const double> phases_b);

// v_pq = v_ref (d_ref / d_pq)^6 for every pair.
PotentialTable potentials(const AtomArray& atoms, double v_ref, double d_ref);

/// Deterministic counter-free random stream (splitmix64 core) with
/// independent substreams for parallel sampling. The seed fully determines
/// every draw; normals use Box-Muller so the sequence is platform-stable.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Independent stream derived from (root seed, index); the parent stream is
  // not advanced.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  double next_uniform();  // in (0, 1]
  double next_normal();   // standard normal

 private:
  RngStream(std::uint64_t state, std::uint64_t root);

  std::uint64_t state_;
  std::uint64_t root_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Every coordinate shifted by an independent normal(0, sigma) draw.
AtomArray perturb(const AtomArray& atoms, double sigma, RngStream& rng);

}  // namespace rydsim
