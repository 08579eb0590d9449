#include <doctest.h>

#include <cmath>
#include <vector>

#include "rydsim/geometry.hpp"
#include "rydsim/types.hpp"

using namespace rydsim;

TEST_CASE("triangle geometry") {
  const AtomArray atoms = triangle_array(2.0);
  REQUIRE(atoms.n_atoms() == 3);
  CHECK(atoms.distance(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(atoms.distance(1, 2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(atoms.distance(0, 2) == doctest::Approx(2.0).epsilon(1e-12));
  for (const auto& p : atoms.positions) {
    CHECK(p.z() == doctest::Approx(0.0));
    CHECK(p.norm() == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(triangle_array(0.0), std::domain_error);
}

TEST_CASE("site phases for the canonical alignment") {
  // d = 2, phi_k - phi_2 = pi/2: phases (-Phi, 0, Phi) with
  // Phi = 2 pi sin(theta_k).
  const AtomArray atoms = triangle_array(2.0);
  const double theta = std::asin(1.0 / 3.0);
  const auto phases = site_phases({theta, kPi / 2.0}, atoms);
  REQUIRE(phases.size() == 3);
  CHECK(phases[0] == doctest::Approx(-2.0 * kPi / 3.0).epsilon(1e-12));
  CHECK(phases[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(phases[2] == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));

  // normal incidence: all phases vanish
  for (double phase : site_phases({0.0, 0.3}, atoms)) {
    CHECK(phase == doctest::Approx(0.0));
  }
}

TEST_CASE("sigma overlap magnitudes") {
  const std::vector<double> zero = {0.0, 0.0, 0.0};
  auto sigma_for = [&zero](double s) {
    const double phi = 2.0 * kPi * s / 3.0;
    const std::vector<double> twisted = {-phi, 0.0, phi};
    return std::abs(sigma_overlap(twisted, zero));
  };
  CHECK(sigma_for(0.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sigma_for(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sigma_for(0.75) == doctest::Approx(1.0).epsilon(1e-12));
  // s = 1 is fully orthogonal
  CHECK(sigma_for(1.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sigma overlap is invariant under rigid translation") {
  AtomArray atoms = triangle_array(2.0);
  const LaserAlignment a{0.4, 0.9};
  const LaserAlignment b{0.1, 2.0};
  const Complex before =
      sigma_overlap(site_phases(a, atoms), site_phases(b, atoms));
  for (auto& p : atoms.positions) p += Eigen::Vector3d(3.0, -1.0, 0.5);
  const Complex after =
      sigma_overlap(site_phases(a, atoms), site_phases(b, atoms));
  CHECK(std::abs(before) == doctest::Approx(std::abs(after)).epsilon(1e-12));
}

TEST_CASE("interaction potentials follow the inverse sixth power") {
  const AtomArray atoms = triangle_array(2.0);
  const PotentialTable table = potentials(atoms, 10.0, 2.0);
  CHECK(table.v(0, 1) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(table.v(1, 0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(table.v(0, 0) == doctest::Approx(0.0));

  const PotentialTable closer = potentials(triangle_array(1.0), 10.0, 2.0);
  CHECK(closer.v(0, 1) == doctest::Approx(640.0).epsilon(1e-12));

  AtomArray degenerate = atoms;
  degenerate.positions[1] = degenerate.positions[0];
  CHECK_THROWS_AS(potentials(degenerate, 10.0, 2.0), std::domain_error);
}

TEST_CASE("rng determinism and substreams") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream root(42);
  RngStream s0 = root.substream(0);
  RngStream s1 = root.substream(1);
  CHECK(s0.next_u64() != s1.next_u64());
  // substreams depend only on (seed, index), not on parent consumption
  RngStream consumed(42);
  consumed.next_u64();
  CHECK(consumed.substream(0).next_u64() == root.substream(0).next_u64());
}

TEST_CASE("rng distribution sanity") {
  RngStream rng(7);
  const int n = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.1));

  RngStream uni(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = uni.next_uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("positional perturbation") {
  const AtomArray atoms = triangle_array(40.0);
  RngStream rng(3);
  const AtomArray same = perturb(atoms, 0.0, rng);
  for (int i = 0; i < 3; ++i) {
    CHECK((same.positions[i] - atoms.positions[i]).norm() == doctest::Approx(0.0));
  }

  // displacement statistics: each coordinate is normal(0, sigma)
  const double sigma = 0.1;
  double sum_sq = 0.0;
  const int trials = 4000;
  RngStream rng2(11);
  for (int t = 0; t < trials; ++t) {
    const AtomArray p = perturb(atoms, sigma, rng2);
    for (int i = 0; i < 3; ++i) {
      sum_sq += (p.positions[i] - atoms.positions[i]).squaredNorm();
    }
  }
  const double per_coord = sum_sq / (trials * 9.0);
  CHECK(per_coord == doctest::Approx(sigma * sigma).epsilon(0.1));

  CHECK_THROWS_AS(perturb(atoms, -0.1, rng), std::domain_error);
}
