#include <doctest.h>

#include <cmath>
#include <vector>

#include "rydsim/errors.hpp"
#include "rydsim/schemes.hpp"

using namespace rydsim;

TEST_CASE("analytic preparation fidelity curve") {
  const std::vector<double> thetas = {0.0, std::asin(1.0 / 3.0),
                                      std::asin(2.0 / 3.0)};
  const auto rows = prep_fidelity_curve(thetas);
  REQUIRE(rows.size() == 3);
  CHECK(std::abs(rows[0].f_zeta10 - 1.0) < 1e-10);
  CHECK(std::abs(rows[1].f_zeta1plus - 1.0) < 1e-10);
  CHECK(std::abs(rows[2].f_zeta1minus - 1.0) < 1e-10);
  // at theta = 0 the chiral overlaps are |1 + 2 cos(2 pi/3)|/3 = 0
  CHECK(std::abs(rows[0].f_zeta1plus) < 1e-10);
  CHECK(std::abs(rows[0].f_zeta1minus) < 1e-10);

  const std::vector<double> bad = {-0.1};
  CHECK_THROWS_AS(prep_fidelity_curve(bad), std::domain_error);
}

TEST_CASE("pathway names round-trip") {
  for (Pathway p : {Pathway::zeta20, Pathway::zeta2minus, Pathway::zeta2plus}) {
    CHECK(pathway_from_string(to_string(p)) == p);
  }
  CHECK_THROWS_AS(pathway_from_string("zeta99"), ConfigurationError);
}

TEST_CASE("conversion durations and equal pulse energy") {
  CHECK(conversion_duration(Pathway::zeta20) == doctest::Approx(1.0));
  // lambda = (1.22^2/3 + 1.42^2 + 2.35^2/3) / (1.22^2/3 + 1.42^2/4 + 2.35^2/3)
  const double o1 = 1.22 * 1.22 / 3.0;
  const double o3 = 2.35 * 2.35 / 3.0;
  const double lambda =
      (o1 + 1.42 * 1.42 + o3) / (o1 + 1.42 * 1.42 / 4.0 + o3);
  CHECK(conversion_duration(Pathway::zeta2minus) ==
        doctest::Approx(lambda).epsilon(1e-12));
  CHECK(conversion_duration(Pathway::zeta2plus) ==
        doctest::Approx(lambda).epsilon(1e-12));
}

TEST_CASE("chiral W preparation reaches the target") {
  const RunResult run = prepare_twisted_w(2.0 * kPi / 3.0);
  CHECK(run.final_fidelity("W_Phi") >= 0.99);
  CHECK(run.fidelities.at("ground").front() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(run.norm_drift < 1e-9);
  CHECK_THROWS_AS(prepare_twisted_w(7.0), std::domain_error);
}

TEST_CASE("zeta20 conversion reaches the rotating GHZ target") {
  const RunResult run = convert_w_to_ghz(Pathway::zeta20);
  CHECK(run.pulse_energy ==
        doctest::Approx(convert_w_to_ghz(Pathway::zeta2minus).pulse_energy)
            .epsilon(1e-12));
  CHECK(run.final_fidelity("GHZ") >= 0.99);
  // the chiral a = 2 states stay dark along this pathway
  for (double f : run.fidelities.at("zeta2minus")) CHECK(f * f < 1e-3);
  for (double f : run.fidelities.at("zeta2plus")) CHECK(f * f < 1e-3);
}

TEST_CASE("pipeline rejects out-of-range twists") {
  CHECK_THROWS_AS(twisted_ladder_pipeline(-0.5), ConfigurationError);
  // s = 1 has |Sigma| = 0: the conversion fields address orthogonal states
  CHECK_THROWS_AS(twisted_ladder_pipeline(1.0), OrthogonalDriveError);
  // an unreachable residual floor is a configuration error
  CHECK_THROWS_AS(twisted_ladder_pipeline(0.5, StepControl{}, 1e6),
                  ConfigurationError);
}

TEST_CASE("Monte Carlo summaries are deterministic and thread-invariant") {
  StepControl light;
  light.record_points = 8;
  const std::vector<double> sigmas = {0.05};
  const MonteCarloSummary a = positional_monte_carlo(sigmas, 4, 7, 1, light);
  const MonteCarloSummary b = positional_monte_carlo(sigmas, 4, 7, 2, light);
  REQUIRE(a.points.size() == 1);
  REQUIRE(b.points.size() == 1);
  for (int i = 0; i < 4; ++i) {
    CHECK(a.points[0].fidelities[i] == b.points[0].fidelities[i]);
  }
  CHECK(a.points[0].mean_fidelity == b.points[0].mean_fidelity);
  CHECK(a.points[0].sigma_d == b.points[0].sigma_d);

  // a different seed gives different samples
  const MonteCarloSummary c = positional_monte_carlo(sigmas, 4, 8, 1, light);
  CHECK(a.points[0].fidelities[0] != c.points[0].fidelities[0]);
}
