#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "paradox/quantum.hpp"
#include "paradox/slits.hpp"

using namespace paradox;
using namespace paradox::slits;

namespace {
SlitGeometry standard_geometry() {
  const double a = 1000.0, lambda = 1.0;
  return SlitGeometry::make(a, lambda, solve_detector_distance(a, lambda));
}
}  // namespace

TEST_CASE("detector distance solves the half-wavelength condition") {
  const double L = solve_detector_distance(1000.0, 1.0);
  CHECK(L == 999999.75);

  // Residual of the defining constraint, over a sweep of ratios.
  for (double ratio : {100.0, 500.0, 1000.0, 12345.0}) {
    const double lambda = 2.0;
    const double a = ratio * lambda;
    const double solved = solve_detector_distance(a, lambda);
    const double residual = std::abs(std::sqrt(solved * solved + a * a) - solved - lambda / 2.0);
    INFO("a/lambda " << ratio);
    CHECK(residual <= 1e-9 * lambda);
  }

  CHECK_THROWS_AS(solve_detector_distance(50.0, 1.0), GeometryViolation);
  CHECK_THROWS_AS(SlitGeometry::make(1000.0, 1.0, -1.0), GeometryViolation);
}

TEST_CASE("the unwatched pair cancels at D") {
  const auto g = standard_geometry();
  CHECK(std::abs(amplitude_at_D(g, PathSetup::open({2, 3}))) <= 1e-9);
  CHECK(std::abs(amplitude_at_D(g, PathSetup::open({1, 3}))) <= 1e-9);
}

TEST_CASE("single-path amplitude has unit magnitude") {
  const auto g = standard_geometry();
  for (int slit : {1, 2, 3})
    CHECK(std::abs(amplitude_at_D(g, PathSetup::open({slit}))) == Catch::Approx(1.0));
}

TEST_CASE("all three slits leave unit amplitude (-1 -1 +1)") {
  const auto g = standard_geometry();
  CHECK(std::abs(amplitude_at_D(g, PathSetup::open({1, 2, 3}))) == Catch::Approx(1.0));
  // That amplitude squared over the source and filter norms is the quantum
  // no-measurement pass probability.
  const double rate = detection_probability(g, PathSetup::open({1, 2, 3}));
  const auto exact = quantum::post_select_probability(
      quantum::AmplitudeVector::from_reals({1, 1, 1}),
      quantum::AmplitudeVector::from_reals({1, 1, -1}));
  CHECK(std::abs(rate - exact.to_double()) <= 1e-9);
}

TEST_CASE("setups are validated") {
  const auto g = standard_geometry();
  CHECK_THROWS_AS(amplitude_at_D(g, PathSetup::open({})), GeometryViolation);
  CHECK_THROWS_AS(amplitude_at_D(g, PathSetup::open({0})), GeometryViolation);
  CHECK_THROWS_AS(amplitude_at_D(g, PathSetup::open({4})), GeometryViolation);
}

TEST_CASE("every D click coincides with a d click") {
  const auto g = standard_geometry();
  for (int d_at : {1, 2}) {
    const auto r = coincidence_experiment(g, d_at);
    INFO("detector at slit " << d_at);
    CHECK(r.p_d_fires == Catch::Approx(1.0 / 3.0));
    CHECK(r.p_D_and_not_d <= 1e-18);
    CHECK(std::abs(r.coincident_fraction - 1.0) <= 1e-9);
    CHECK(r.silent_branch_amplitude <= 1e-9);
    // Joint D-and-d probability mirrors the exact engine's found-and-pass.
    CHECK(std::abs(r.p_D_and_d - 1.0 / 9.0) <= 1e-9);
  }
  CHECK_THROWS_AS(coincidence_experiment(g, 3), UnsupportedDetectorPosition);
  CHECK_THROWS_AS(coincidence_experiment(g, 0), UnsupportedDetectorPosition);
}

TEST_CASE("slits 1 and 2 exchange symmetrically") {
  const auto g = standard_geometry();
  const auto r1 = coincidence_experiment(g, 1);
  const auto r2 = coincidence_experiment(g, 2);
  CHECK(std::abs(r1.p_D_and_d - r2.p_D_and_d) <= 1e-12);
  CHECK(std::abs(r1.p_D_and_not_d - r2.p_D_and_not_d) <= 1e-12);
  CHECK(std::abs(r1.p_D - r2.p_D) <= 1e-12);
}

TEST_CASE("branch probabilities sum to one") {
  const auto g = standard_geometry();
  const auto r = coincidence_experiment(g, 1);
  const double total = r.p_D_and_d + (r.p_d_fires - r.p_D_and_d) + r.p_D_and_not_d +
                       ((1.0 - r.p_d_fires) - r.p_D_and_not_d);
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("the solved geometry realizes the (1,1,-1) ray") {
  const auto g = standard_geometry();
  const auto mapped = map_to_threebox(g);
  CHECK(mapped.residual <= 1e-9);
  CHECK(mapped.ray == quantum::AmplitudeVector::from_reals({1, 1, -1}));
}

TEST_CASE("the mapped ray is scale invariant") {
  const double a = 1000.0, lambda = 1.0;
  const auto g1 = SlitGeometry::make(a, lambda, solve_detector_distance(a, lambda));
  const auto g10 = SlitGeometry::make(10 * a, 10 * lambda,
                                      solve_detector_distance(10 * a, 10 * lambda));
  CHECK(map_to_threebox(g1).ray == map_to_threebox(g10).ray);
  CHECK(map_to_threebox(g10).residual <= 1e-9);
}

TEST_CASE("off-condition geometries leave the ray") {
  const double a = 1000.0, lambda = 1.0;
  const double L = solve_detector_distance(a, lambda);

  // Moving D half a wavelength barely changes the relative phases (the
  // excess path is stationary in L), but enough to break the 1e-9 equality.
  const auto nudged = map_to_threebox(SlitGeometry::make(a, lambda, L + lambda / 2.0));
  CHECK(nudged.residual > 1e-9);

  // Breaking the half-wave condition by a half cycle (excess = lambda)
  // aligns all three paths instead.
  const double L_full_wave = a * a / (2.0 * lambda) - lambda / 2.0;
  const auto aligned = map_to_threebox(SlitGeometry::make(a, lambda, L_full_wave));
  CHECK(aligned.residual <= 1e-9);
  CHECK(aligned.ray == quantum::AmplitudeVector::from_reals({1, 1, 1}));
}
