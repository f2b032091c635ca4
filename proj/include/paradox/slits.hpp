#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "paradox/complex_rational.hpp"
#include "paradox/errors.hpp"
#include "paradox/quantum.hpp"
#include "paradox/random.hpp"
#include "paradox/report.hpp"

namespace paradox::slits {

/// Three equally spaced slits, slits 1 and 2 at +/-a off-axis, slit 3
/// on-axis; the detector D sits on-axis at distance L from slit 3. This is
/// the one floating-point engine: every "zero" here is a tolerance claim.
struct SlitGeometry {
  double a;       // slit separation
  double lambda;  // wavelength, same length unit
  double L;       // slit 3 to detector D

  static SlitGeometry make(double a, double lambda, double L) {
    validate_ratio(a, lambda);
    if (!(L > 0)) throw GeometryViolation("detector distance must be positive");
    return SlitGeometry{a, lambda, L};
  }

  static void validate_ratio(double a, double lambda) {
    if (!(lambda > 0) || !(a > 0)) throw GeometryViolation("lengths must be positive");
    if (a / lambda < 100.0)
      throw GeometryViolation("a/lambda must be at least 100 for the paraxial setup");
  }

  /// Excess path from an off-axis slit to D over the on-axis path,
  /// sqrt(L^2+a^2) - L, computed without cancellation.
  double off_axis_excess() const { return a * a / (std::sqrt(L * L + a * a) + L); }
};

/// Solves sqrt(L^2+a^2) - L = lambda/2 for L; closed form a^2/lambda - lambda/4.
inline double solve_detector_distance(double a, double lambda) {
  SlitGeometry::validate_ratio(a, lambda);
  return a * a / lambda - lambda / 4.0;
}

/// Which slits are open, with what amplitude, and whether a which-path
/// detector d sits at one of them.
struct PathSetup {
  std::vector<int> open_slits;                    // subset of {1,2,3}
  std::map<int, std::complex<double>> weights;    // defaults to 1 per open slit
  std::optional<int> which_path_detector;

  static PathSetup open(std::vector<int> slits) { return PathSetup{std::move(slits), {}, {}}; }
};

namespace detail {
inline void validate_setup(const PathSetup& setup) {
  if (setup.open_slits.empty()) throw GeometryViolation("no open slit");
  for (int s : setup.open_slits)
    if (s < 1 || s > 3) throw GeometryViolation("slit index out of range");
  for (const auto& [s, w] : setup.weights)
    if (std::abs(w) == 0.0) throw GeometryViolation("zero weight on an open slit");
}

// Path phase of slit j relative to the on-axis slit, exp(i*2*pi*(r_j - L)/lambda).
inline std::complex<double> relative_phase(const SlitGeometry& g, int slit) {
  const double excess = (slit == 3) ? 0.0 : g.off_axis_excess();
  const double angle = 2.0 * std::numbers::pi * excess / g.lambda;
  return std::polar(1.0, angle);
}

// Common on-axis phase exp(i*2*pi*L/lambda); fmod keeps the argument small.
inline std::complex<double> axis_phase(const SlitGeometry& g) {
  const double angle = 2.0 * std::numbers::pi * std::fmod(g.L, g.lambda) / g.lambda;
  return std::polar(1.0, angle);
}
}  // namespace detail

/// Field amplitude at D: sum over open slits of w_j * exp(i*2*pi*r_j/lambda),
/// unit weights unless specified. Phases are accumulated relative to the
/// on-axis path so the half-wavelength cancellation survives double precision.
inline std::complex<double> amplitude_at_D(const SlitGeometry& g, const PathSetup& setup) {
  detail::validate_setup(setup);
  std::complex<double> acc = 0.0;
  for (int slit : setup.open_slits) {
    const auto it = setup.weights.find(slit);
    const std::complex<double> w = (it == setup.weights.end()) ? 1.0 : it->second;
    acc += w * detail::relative_phase(g, slit);
  }
  return detail::axis_phase(g) * acc;
}

/// Probability that a particle in the given branch triggers D, normalized so
/// a fully aligned single source-detector pair scores 1. D's filter spans all
/// three path phases, so this is the float twin of the exact engine's
/// post-selection probability; with all three slits open it equals 1/9.
inline double detection_probability(const SlitGeometry& g, const PathSetup& setup) {
  detail::validate_setup(setup);
  std::complex<double> overlap = 0.0;
  double source_norm2 = 0.0;
  for (int slit : setup.open_slits) {
    const auto it = setup.weights.find(slit);
    const std::complex<double> w = (it == setup.weights.end()) ? 1.0 : it->second;
    overlap += std::conj(detail::relative_phase(g, slit)) * w;
    source_norm2 += std::norm(w);
  }
  const double filter_norm2 = 3.0;
  return std::norm(overlap) / (filter_norm2 * source_norm2);
}

/// Analytic coincidence statistics for a which-path detector d at slit 1 or 2.
/// The detector fully decoheres "went through d's slit" against "went through
/// the other two": the source (1,1,1) splits into those two branches.
struct CoincidenceReport {
  int d_at = 0;
  double p_d_fires = 0.0;            // branch weight: particle seen at d
  double p_D_and_d = 0.0;            // D clicks and d fired
  double p_D_and_not_d = 0.0;        // D clicks with d silent
  double p_D = 0.0;
  double coincident_fraction = 0.0;  // of D clicks, the share with d firing
  double silent_branch_amplitude = 0.0;  // |amplitude_at_D| of the unwatched pair
};

inline CoincidenceReport coincidence_experiment(const SlitGeometry& g, int d_at) {
  if (d_at == 3) throw UnsupportedDetectorPosition("no rule for a detector at the middle slit");
  if (d_at != 1 && d_at != 2) throw UnsupportedDetectorPosition("detector sits at slit 1 or 2");
  std::vector<int> rest;
  for (int s : {1, 2, 3})
    if (s != d_at) rest.push_back(s);

  CoincidenceReport r;
  r.d_at = d_at;
  r.p_d_fires = 1.0 / 3.0;
  const double p_silent = 2.0 / 3.0;
  r.p_D_and_d = r.p_d_fires * detection_probability(g, PathSetup::open({d_at}));
  r.p_D_and_not_d = p_silent * detection_probability(g, PathSetup::open(rest));
  r.p_D = r.p_D_and_d + r.p_D_and_not_d;
  r.coincident_fraction = r.p_D_and_d / r.p_D;
  r.silent_branch_amplitude = std::abs(amplitude_at_D(g, PathSetup::open(rest)));
  return r;
}

/// One sampled run of the coincidence experiment: which branch fired, then a
/// Bernoulli D click at that branch's detection probability.
inline RunKey sample_coincidence_run(const SlitGeometry& g, std::optional<int> d_at,
                                     RandomSource& rng) {
  if (!d_at.has_value()) {
    const bool click = rng.next_unit() < detection_probability(g, PathSetup::open({1, 2, 3}));
    return RunKey{{}, click};
  }
  const CoincidenceReport r = coincidence_experiment(g, *d_at);
  std::vector<Dist<bool>::Entry> branch;
  branch.emplace_back(true, Rational(1, 3));
  branch.emplace_back(false, Rational(2, 3));
  const bool fires = Dist<bool>::merged(std::move(branch)).sample(rng);
  const double p_click = fires ? r.p_D_and_d / r.p_d_fires : r.p_D_and_not_d / (2.0 / 3.0);
  const bool click = rng.next_unit() < p_click;
  return RunKey{{fires ? "d" : "silent"}, click};
}

/// The post-selection ray D realizes, read off the path phases and snapped to
/// the nearest unit Gaussian integers (global phase fixed so slit 1 carries +1).
/// `residual` is the largest snapping distance; for a solved geometry the ray
/// is (1,1,-1) with residual at double-precision noise.
struct MappedRay {
  quantum::AmplitudeVector ray;
  double residual;
};

inline MappedRay map_to_threebox(const SlitGeometry& g) {
  const std::complex<double> anchor = detail::relative_phase(g, 1);
  std::vector<ComplexRational> snapped;
  double residual = 0.0;
  for (int slit : {1, 2, 3}) {
    const std::complex<double> w = detail::relative_phase(g, slit) * std::conj(anchor);
    static const std::vector<std::pair<std::complex<double>, ComplexRational>> units = {
        {{1, 0}, ComplexRational(Rational(1))},
        {{-1, 0}, ComplexRational(Rational(-1))},
        {{0, 1}, ComplexRational(Rational(0), Rational(1))},
        {{0, -1}, ComplexRational(Rational(0), Rational(-1))},
    };
    double best = 4.0;
    ComplexRational pick;
    for (const auto& [unit, exact] : units) {
      const double dist = std::abs(w - unit);
      if (dist < best) {
        best = dist;
        pick = exact;
      }
    }
    residual = std::max(residual, best);
    snapped.push_back(pick);
  }
  return MappedRay{quantum::AmplitudeVector({"p1", "p2", "p3"}, std::move(snapped)), residual};
}

}  // namespace paradox::slits
