#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "paradox/errors.hpp"
#include "paradox/random.hpp"
#include "paradox/rational.hpp"

namespace paradox {

/// Exact discrete distribution: outcomes with rational weights that sum to
/// exactly one. Entries are kept merged (outcomes pairwise distinct), free of
/// zero weights, and sorted by outcome, so equal distributions compare equal.
///
/// T needs a strict weak order (operator<) and equality.
template <class T>
class Dist {
 public:
  using Entry = std::pair<T, Rational>;

  /// Builds from raw entries, merging repeated outcomes by weight addition.
  static Dist merged(std::vector<Entry> raw) {
    for (const auto& [outcome, weight] : raw) {
      if (weight.is_negative())
        throw InvalidDistribution("negative weight " + weight.str());
    }
    std::sort(raw.begin(), raw.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::vector<Entry> out;
    Rational total;
    for (auto& e : raw) {
      total += e.second;
      if (!out.empty() && out.back().first == e.first) {
        out.back().second += e.second;
      } else {
        out.push_back(std::move(e));
      }
    }
    if (!total.is_one())
      throw InvalidDistribution("weights sum to " + total.str() + ", not 1");
    std::erase_if(out, [](const Entry& e) { return e.second.is_zero(); });
    return Dist(std::move(out));
  }

  static Dist certain(T outcome) {
    std::vector<Entry> e;
    e.emplace_back(std::move(outcome), Rational(1));
    return Dist(std::move(e));
  }

  /// Uniform pick over a multiset: every item gets exactly 1/n, equal items
  /// merge. `items` is taken in canonical (sorted) order internally.
  static Dist uniform(std::vector<T> items) {
    if (items.empty()) throw InvalidDistribution("uniform over empty multiset");
    const Rational w(1, static_cast<long long>(items.size()));
    std::vector<Entry> raw;
    raw.reserve(items.size());
    for (auto& item : items) raw.emplace_back(std::move(item), w);
    return merged(std::move(raw));
  }

  const std::vector<Entry>& entries() const& { return entries_; }
  // Rvalue overload hands the entries out by value, so iterating the entries
  // of an unnamed distribution cannot dangle.
  std::vector<Entry> entries() && { return std::move(entries_); }

  std::size_t size() const { return entries_.size(); }

  /// Probability of `outcome`; zero when absent from the support.
  Rational prob(const T& outcome) const {
    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), outcome,
        [](const Entry& e, const T& v) { return e.first < v; });
    if (it != entries_.end() && it->first == outcome) return it->second;
    return Rational(0);
  }

  /// Draws one outcome; each hits with its exact weight. Consumes the source
  /// deterministically: all weights are put over one common denominator D and
  /// a single uniform draw below D selects the outcome.
  T sample(RandomSource& rng) && { return static_cast<const Dist&>(*this).sample(rng); }

  const T& sample(RandomSource& rng) const& {
    BigInt common_den = 1;
    for (const auto& e : entries_)
      common_den = lcm(common_den, e.second.denominator());
    const BigInt r = rng.uniform_below(common_den);
    BigInt cumulative = 0;
    for (const auto& e : entries_) {
      cumulative += e.second.numerator() * (common_den / e.second.denominator());
      if (r < cumulative) return e.first;
    }
    return entries_.back().first;  // unreachable: weights sum to 1
  }

  friend bool operator==(const Dist& a, const Dist& b) = default;

 private:
  explicit Dist(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidDistribution("empty distribution");
  }

  std::vector<Entry> entries_;
};

/// Law of total probability: weight of t is sum over s of prior(s)*kernel(s)(t).
/// A kernel with no distribution for a reachable outcome signals by throwing
/// KernelGap, which propagates.
template <class S, class K>
auto chain(const Dist<S>& prior, K&& kernel)
    -> Dist<typename std::invoke_result_t<K, const S&>::Entry::first_type> {
  using T = typename std::invoke_result_t<K, const S&>::Entry::first_type;
  std::vector<typename Dist<T>::Entry> raw;
  for (const auto& [s, ws] : prior.entries()) {
    const auto next = kernel(s);
    for (const auto& [t, wt] : next.entries()) raw.emplace_back(t, ws * wt);
  }
  return Dist<T>::merged(std::move(raw));
}

/// Pushforward along f (deterministic kernel).
template <class S, class F>
auto map(const Dist<S>& d, F&& f) -> Dist<std::invoke_result_t<F, const S&>> {
  using T = std::invoke_result_t<F, const S&>;
  std::vector<typename Dist<T>::Entry> raw;
  for (const auto& [s, w] : d.entries()) raw.emplace_back(f(s), w);
  return Dist<T>::merged(std::move(raw));
}

/// Restricts to outcomes satisfying pred and renormalizes.
template <class T, class P>
Dist<T> conditioned(const Dist<T>& d, P&& pred) {
  std::vector<typename Dist<T>::Entry> kept;
  Rational total;
  for (const auto& e : d.entries()) {
    if (pred(e.first)) {
      kept.push_back(e);
      total += e.second;
    }
  }
  if (total.is_zero())
    throw DegenerateConditioning("conditioning on a probability-zero event");
  for (auto& e : kept) e.second /= total;
  return Dist<T>::merged(std::move(kept));
}

}  // namespace paradox
