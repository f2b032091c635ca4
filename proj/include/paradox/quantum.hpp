#pragma once

#include <algorithm>
#include <compare>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "paradox/complex_rational.hpp"
#include "paradox/dist.hpp"
#include "paradox/errors.hpp"
#include "paradox/random.hpp"
#include "paradox/report.hpp"

namespace paradox::quantum {

/// Unnormalized state vector over labeled basis states, with exact Gaussian
/// rational amplitudes. Normalization factors like 1/sqrt(3) are irrational,
/// so they are carried implicitly: every probability below is a ratio of
/// squared norms, which makes (1,1,1) and (1,1,1)/sqrt(3) the same state.
class AmplitudeVector {
 public:
  AmplitudeVector(std::vector<std::string> basis, std::vector<ComplexRational> amplitudes)
      : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
    if (basis_.size() != amps_.size())
      throw Error("amplitude count does not match basis size");
    std::set<std::string> seen(basis_.begin(), basis_.end());
    if (seen.size() != basis_.size()) throw Error("duplicate basis label");
    if (std::all_of(amps_.begin(), amps_.end(),
                    [](const ComplexRational& z) { return z.is_zero(); }))
      throw Error("zero amplitude vector");
  }

  /// Real integer amplitudes over an auto-labeled basis p1..pn.
  static AmplitudeVector from_reals(const std::vector<long long>& values) {
    std::vector<std::string> basis;
    std::vector<ComplexRational> amps;
    for (std::size_t j = 0; j < values.size(); ++j) {
      basis.push_back("p" + std::to_string(j + 1));
      amps.emplace_back(Rational(values[j]));
    }
    return AmplitudeVector(std::move(basis), std::move(amps));
  }

  const std::vector<std::string>& basis() const { return basis_; }
  const std::vector<ComplexRational>& amplitudes() const { return amps_; }
  std::size_t dim() const { return basis_.size(); }

  Rational norm2() const {
    Rational n;
    for (const auto& z : amps_) n += z.norm2();
    return n;
  }

  AmplitudeVector scaled(const ComplexRational& s) const {
    std::vector<ComplexRational> amps;
    amps.reserve(amps_.size());
    for (const auto& z : amps_) amps.push_back(s * z);
    return AmplitudeVector(basis_, std::move(amps));
  }

  friend bool operator==(const AmplitudeVector&, const AmplitudeVector&) = default;
  friend auto operator<=>(const AmplitudeVector& a, const AmplitudeVector& b) {
    if (auto c = a.basis_ <=> b.basis_; c != 0) return c;
    return a.amps_ <=> b.amps_;
  }

 private:
  std::vector<std::string> basis_;
  std::vector<ComplexRational> amps_;
};

/// One cell of a projective measurement: an outcome label and the basis
/// labels it projects onto.
struct MeasurementCell {
  std::string outcome;
  std::vector<std::string> members;
};

/// Projective measurement given by a partition of the basis labels into
/// disjoint, exhaustive cells. Only basis-aligned projectors are supported.
class Measurement {
 public:
  explicit Measurement(std::vector<MeasurementCell> cells) : cells_(std::move(cells)) {
    if (cells_.empty()) throw Error("measurement with no cells");
    std::set<std::string> outcomes;
    for (const auto& cell : cells_) {
      if (cell.members.empty()) throw Error("empty measurement cell");
      if (!outcomes.insert(cell.outcome).second)
        throw Error("duplicate outcome label '" + cell.outcome + "'");
    }
  }

  /// The analog of opening one box: {target} vs everything else, labeled
  /// "found" / "not_found".
  static Measurement opening(const std::vector<std::string>& basis, const std::string& target) {
    std::vector<std::string> rest;
    for (const auto& b : basis)
      if (b != target) rest.push_back(b);
    if (rest.size() == basis.size())
      throw BasisMismatch("no basis label '" + target + "' to open");
    if (rest.empty()) throw Error("opening the whole basis leaves no complement");
    return Measurement({{"found", {target}}, {"not_found", std::move(rest)}});
  }

  /// Complete (all-singletons) measurement, outcomes labeled by basis label.
  static Measurement fine(const std::vector<std::string>& basis) {
    std::vector<MeasurementCell> cells;
    for (const auto& b : basis) cells.push_back({b, {b}});
    return Measurement(std::move(cells));
  }

  const std::vector<MeasurementCell>& cells() const { return cells_; }

  /// Checks the partition property against a concrete basis.
  void validate_against(const std::vector<std::string>& basis) const {
    std::set<std::string> want(basis.begin(), basis.end());
    std::set<std::string> seen;
    for (const auto& cell : cells_) {
      for (const auto& label : cell.members) {
        if (!want.count(label))
          throw BasisMismatch("cell label '" + label + "' not in basis");
        if (!seen.insert(label).second)
          throw BasisMismatch("cell label '" + label + "' appears twice");
      }
    }
    if (seen.size() != want.size())
      throw BasisMismatch("measurement cells do not cover the basis");
  }

 private:
  std::vector<MeasurementCell> cells_;
};

namespace detail {
inline void require_same_basis(const AmplitudeVector& u, const AmplitudeVector& v) {
  if (u.basis() != v.basis()) throw BasisMismatch("vectors live on different bases");
}

// <u|P_cell|v> without materializing the projected vector, which may be zero.
inline ComplexRational projected_overlap(const AmplitudeVector& u, const AmplitudeVector& v,
                                         const MeasurementCell& cell) {
  const std::set<std::string> members(cell.members.begin(), cell.members.end());
  ComplexRational acc;
  for (std::size_t j = 0; j < u.dim(); ++j)
    if (members.count(u.basis()[j])) acc += u.amplitudes()[j].conj() * v.amplitudes()[j];
  return acc;
}
}  // namespace detail

/// <u|v> = sum over j of conj(u_j) * v_j, exact.
inline ComplexRational inner_product(const AmplitudeVector& u, const AmplitudeVector& v) {
  detail::require_same_basis(u, v);
  ComplexRational acc;
  for (std::size_t j = 0; j < u.dim(); ++j)
    acc += u.amplitudes()[j].conj() * v.amplitudes()[j];
  return acc;
}

/// Outcome of one measurement branch: label plus collapsed (unnormalized) state.
struct MeasureBranch {
  std::string outcome;
  AmplitudeVector state;

  friend bool operator==(const MeasureBranch&, const MeasureBranch&) = default;
  friend auto operator<=>(const MeasureBranch&, const MeasureBranch&) = default;
};

/// Projective measurement with Lueders collapse: each cell C occurs with
/// probability |P_C psi|^2 / |psi|^2 and leaves the restriction of psi to C.
/// Zero-probability cells are omitted.
inline Dist<MeasureBranch> measure(const AmplitudeVector& state, const Measurement& m) {
  m.validate_against(state.basis());
  const Rational total = state.norm2();
  std::vector<Dist<MeasureBranch>::Entry> raw;
  for (const auto& cell : m.cells()) {
    std::vector<ComplexRational> amps = state.amplitudes();
    std::set<std::string> members(cell.members.begin(), cell.members.end());
    Rational weight;
    for (std::size_t j = 0; j < amps.size(); ++j) {
      if (members.count(state.basis()[j])) {
        weight += amps[j].norm2();
      } else {
        amps[j] = ComplexRational();
      }
    }
    if (weight.is_zero()) continue;
    raw.emplace_back(MeasureBranch{cell.outcome, AmplitudeVector(state.basis(), std::move(amps))},
                     weight / total);
  }
  return Dist<MeasureBranch>::merged(std::move(raw));
}

/// Probability that `state` passes the filter: |<filter|state>|^2 divided by
/// both squared norms. Scale invariant in each argument.
inline Rational post_select_probability(const AmplitudeVector& state,
                                        const AmplitudeVector& filter) {
  detail::require_same_basis(state, filter);
  return inner_product(filter, state).norm2() / (filter.norm2() * state.norm2());
}

/// Pre/post-selected experiment: prepared state, ordered intermediate
/// measurements, final filter. Stage order is the time order.
struct PpsExperiment {
  AmplitudeVector pre;
  std::vector<Measurement> stages;
  AmplitudeVector post;
};

/// Exact joint law over (stage outcomes, filter pass) by chaining measure
/// over every stage and closing with post_select_probability.
inline ExactReport run_pps(const PpsExperiment& exp) {
  detail::require_same_basis(exp.pre, exp.post);
  struct Prefix {
    std::vector<std::string> outcomes;
    AmplitudeVector state;
    bool operator==(const Prefix&) const = default;
    auto operator<=>(const Prefix&) const = default;
  };
  auto frontier = Dist<Prefix>::certain(Prefix{{}, exp.pre});
  for (const auto& stage : exp.stages) {
    frontier = chain(frontier, [&stage](const Prefix& p) {
      return map(measure(p.state, stage), [&p](const MeasureBranch& b) {
        Prefix next{p.outcomes, b.state};
        next.outcomes.push_back(b.outcome);
        return next;
      });
    });
  }
  auto joint = chain(frontier, [&exp](const Prefix& p) {
    const Rational pass = post_select_probability(p.state, exp.post);
    std::vector<Dist<RunKey>::Entry> raw;
    raw.emplace_back(RunKey{p.outcomes, true}, pass);
    raw.emplace_back(RunKey{p.outcomes, false}, Rational(1) - pass);
    return Dist<RunKey>::merged(std::move(raw));
  });
  return ExactReport(std::move(joint));
}

/// One sampled run of the experiment; deterministic under a fixed source.
inline RunKey sample_pps_run(const PpsExperiment& exp, RandomSource& rng) {
  detail::require_same_basis(exp.pre, exp.post);
  AmplitudeVector state = exp.pre;
  std::vector<std::string> outcomes;
  for (const auto& stage : exp.stages) {
    const auto branches = measure(state, stage);
    const MeasureBranch& branch = branches.sample(rng);
    outcomes.push_back(branch.outcome);
    state = branch.state;
  }
  const Rational p = post_select_probability(state, exp.post);
  std::vector<Dist<bool>::Entry> coin;
  coin.emplace_back(true, p);
  coin.emplace_back(false, Rational(1) - p);
  const bool pass = Dist<bool>::merged(std::move(coin)).sample(rng);
  return RunKey{std::move(outcomes), pass};
}

/// Two-time retrodiction rule for the intermediate outcome, conditioned on
/// both the preparation and the final filter:
///
///   P(C) = |<post|P_C|pre>|^2 / sum over C' of |<post|P_C'|pre>|^2
///
/// Equals the conditional-given-pass law of run_pps with the single stage m.
inline Dist<std::string> abl_probabilities(const AmplitudeVector& pre,
                                           const AmplitudeVector& post, const Measurement& m) {
  detail::require_same_basis(pre, post);
  m.validate_against(pre.basis());
  std::vector<std::pair<std::string, Rational>> weights;
  Rational total;
  for (const auto& cell : m.cells()) {
    const Rational w = detail::projected_overlap(post, pre, cell).norm2();
    total += w;
    weights.emplace_back(cell.outcome, w);
  }
  if (total.is_zero())
    throw DegenerateConditioning("filter unreachable through every cell");
  std::vector<Dist<std::string>::Entry> raw;
  for (auto& [outcome, w] : weights) raw.emplace_back(std::move(outcome), w / total);
  return Dist<std::string>::merged(std::move(raw));
}

}  // namespace paradox::quantum
