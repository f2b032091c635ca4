#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "paradox/dist.hpp"
#include "paradox/rational.hpp"

namespace paradox {

/// One run through an experiment: the intermediate outcome labels in order,
/// plus whether the final filter passed.
struct RunKey {
  std::vector<std::string> outcomes;
  bool pass = false;

  friend bool operator==(const RunKey&, const RunKey&) = default;
  friend auto operator<=>(const RunKey&, const RunKey&) = default;
};

/// Exact joint law over (outcome sequence, pass flag), shared by the quantum
/// and classical engines so their reports line up side by side.
class ExactReport {
 public:
  explicit ExactReport(Dist<RunKey> joint) : joint_(std::move(joint)) {}

  const Dist<RunKey>& joint() const { return joint_; }

  Rational prob(const std::vector<std::string>& outcomes, bool pass) const {
    return joint_.prob(RunKey{outcomes, pass});
  }

  Rational p_pass() const {
    Rational p;
    for (const auto& [key, w] : joint_.entries())
      if (key.pass) p += w;
    return p;
  }

  /// Distribution over outcome sequences among passing runs.
  /// Throws DegenerateConditioning when nothing passes.
  Dist<std::vector<std::string>> conditional_given_pass() const {
    const auto passing = conditioned(joint_, [](const RunKey& k) { return k.pass; });
    return map(passing, [](const RunKey& k) { return k.outcomes; });
  }

  /// Every outcome sequence in the support, sorted, each listed once.
  std::vector<std::vector<std::string>> outcome_sequences() const {
    std::vector<std::vector<std::string>> seqs;
    for (const auto& [key, w] : joint_.entries())
      if (seqs.empty() || seqs.back() != key.outcomes) seqs.push_back(key.outcomes);
    return seqs;
  }

  friend bool operator==(const ExactReport&, const ExactReport&) = default;

 private:
  Dist<RunKey> joint_;
};

/// Monte Carlo tally of sampled runs for the same key space.
struct McTally {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::map<RunKey, std::uint64_t> counts;

  double freq(const RunKey& key) const {
    const auto it = counts.find(key);
    return it == counts.end() ? 0.0
                              : static_cast<double>(it->second) / static_cast<double>(trials);
  }

  friend bool operator==(const McTally&, const McTally&) = default;
};

}  // namespace paradox
