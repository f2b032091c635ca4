#pragma once

#include <algorithm>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "paradox/dist.hpp"
#include "paradox/errors.hpp"
#include "paradox/random.hpp"
#include "paradox/report.hpp"

namespace paradox::cards {

enum class Face : char { Jack = 'J', King = 'K', Queen = 'Q' };
enum class Suit : char { Diamonds = 'D', Hearts = 'H', Spades = 'S' };
enum class Attribute { Face, Suit };

inline std::string attribute_name(Attribute a) {
  return a == Attribute::Face ? "Face" : "Suit";
}

/// Value range of an attribute, in canonical (label) order.
inline const std::vector<char>& value_range(Attribute a) {
  static const std::vector<char> faces{'J', 'K', 'Q'};
  static const std::vector<char> suits{'D', 'H', 'S'};
  return a == Attribute::Face ? faces : suits;
}

struct Card {
  Face face;
  Suit suit;

  char value(Attribute a) const {
    return a == Attribute::Face ? static_cast<char>(face) : static_cast<char>(suit);
  }

  /// Two-character label, face then suit: "QS", "KH".
  std::string label() const { return {static_cast<char>(face), static_cast<char>(suit)}; }

  static Card parse(const std::string& label) {
    if (label.size() != 2) throw ParseError("card label must be two characters: '" + label + "'");
    const auto& faces = value_range(Attribute::Face);
    const auto& suits = value_range(Attribute::Suit);
    if (!std::count(faces.begin(), faces.end(), label[0]) ||
        !std::count(suits.begin(), suits.end(), label[1]))
      throw ParseError("unknown card '" + label + "'");
    return Card{static_cast<Face>(label[0]), static_cast<Suit>(label[1])};
  }

  friend bool operator==(const Card&, const Card&) = default;
  friend auto operator<=>(const Card&, const Card&) = default;
};

/// Multiset of cards kept sorted by label, so enumeration order, sampling
/// order and equality are all canonical.
class Deck {
 public:
  Deck() = default;
  explicit Deck(std::vector<Card> cards) : cards_(std::move(cards)) {
    std::sort(cards_.begin(), cards_.end());
  }

  static Deck parse(const std::vector<std::string>& labels) {
    std::vector<Card> cards;
    cards.reserve(labels.size());
    for (const auto& l : labels) cards.push_back(Card::parse(l));
    return Deck(std::move(cards));
  }

  /// QS, QD, KH, KH, JS, JD.
  static const Deck& standard() {
    static const Deck deck = Deck::parse({"QS", "QD", "KH", "KH", "JS", "JD"});
    return deck;
  }

  const std::vector<Card>& cards() const { return cards_; }
  std::size_t size() const { return cards_.size(); }
  bool empty() const { return cards_.empty(); }

  Deck matching(Attribute a, const std::vector<char>& values) const {
    std::vector<Card> kept;
    for (const Card& c : cards_)
      if (std::count(values.begin(), values.end(), c.value(a))) kept.push_back(c);
    return Deck(std::move(kept));
  }

  Deck excluding(Attribute a, const std::vector<char>& values) const {
    std::vector<Card> kept;
    for (const Card& c : cards_)
      if (!std::count(values.begin(), values.end(), c.value(a))) kept.push_back(c);
    return Deck(std::move(kept));
  }

  /// Multiset union.
  friend Deck operator+(const Deck& a, const Deck& b) {
    std::vector<Card> all = a.cards_;
    all.insert(all.end(), b.cards_.begin(), b.cards_.end());
    return Deck(std::move(all));
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(cards_.size());
    for (const Card& c : cards_) out.push_back(c.label());
    return out;
  }

  friend bool operator==(const Deck&, const Deck&) = default;
  friend auto operator<=>(const Deck&, const Deck&) = default;

 private:
  std::vector<Card> cards_;
};

/// A partition of one attribute's value range into labeled cells; one
/// observation asks which cell the picked card's value falls in.
class ValuePartition {
 public:
  struct Cell {
    std::string label;
    std::vector<char> values;
  };

  ValuePartition(Attribute attribute, std::vector<Cell> cells)
      : attribute_(attribute), cells_(std::move(cells)) {
    const auto& range = value_range(attribute_);
    std::set<char> seen;
    std::set<std::string> labels;
    for (auto& cell : cells_) {
      if (cell.values.empty()) throw Error("empty partition cell");
      std::sort(cell.values.begin(), cell.values.end());
      if (!labels.insert(cell.label).second)
        throw Error("duplicate cell label '" + cell.label + "'");
      for (char v : cell.values) {
        if (!std::count(range.begin(), range.end(), v))
          throw Error(std::string("value '") + v + "' not in the " +
                      attribute_name(attribute_) + " range");
        if (!seen.insert(v).second) throw Error(std::string("value '") + v + "' in two cells");
      }
    }
    if (seen.size() != range.size()) throw Error("partition does not cover the value range");
  }

  /// The box-opening analog: a binary question "is the value in `values`?",
  /// cells labeled "yes" / "no".
  static ValuePartition look_for(Attribute attribute, const std::vector<char>& values) {
    std::vector<char> rest;
    for (char v : value_range(attribute))
      if (!std::count(values.begin(), values.end(), v)) rest.push_back(v);
    if (rest.empty() || rest.size() == value_range(attribute).size())
      throw Error("look cell must be a proper nonempty subset");
    return ValuePartition(attribute, {{"yes", values}, {"no", std::move(rest)}});
  }

  /// Complete observation: one singleton cell per value, labeled by value.
  static ValuePartition fine(Attribute attribute) {
    std::vector<Cell> cells;
    for (char v : value_range(attribute)) cells.push_back({std::string(1, v), {v}});
    return ValuePartition(attribute, std::move(cells));
  }

  Attribute attribute() const { return attribute_; }
  const std::vector<Cell>& cells() const { return cells_; }

  const Cell& cell_containing(char value) const {
    for (const auto& cell : cells_)
      if (std::count(cell.values.begin(), cell.values.end(), value)) return cell;
    throw Error(std::string("no cell holds value '") + value + "'");
  }

  friend bool operator==(const ValuePartition& a, const ValuePartition& b) {
    if (a.attribute_ != b.attribute_ || a.cells_.size() != b.cells_.size()) return false;
    for (std::size_t i = 0; i < a.cells_.size(); ++i)
      if (a.cells_[i].label != b.cells_[i].label || a.cells_[i].values != b.cells_[i].values)
        return false;
    return true;
  }

 private:
  Attribute attribute_;
  std::vector<Cell> cells_;
};

/// The game's state: the These/Others split of the full deck plus which
/// attribute was observed last. The pick rule keys on `last`.
struct GameState {
  Deck these;
  Deck others;
  Attribute last;

  Deck full_deck() const { return these + others; }

  friend bool operator==(const GameState&, const GameState&) = default;
  friend auto operator<=>(const GameState&, const GameState&) = default;
};

/// Imposes a value set of one attribute: matching cards form These, the rest
/// Others, and the attribute counts as the last observation.
inline GameState prepare(const Deck& deck, Attribute attribute, const std::vector<char>& values) {
  Deck these = deck.matching(attribute, values);
  if (these.empty())
    throw ImpossiblePreparation("no card in the deck matches the prepared values");
  Deck others = deck.excluding(attribute, values);
  return GameState{std::move(these), std::move(others), attribute};
}

namespace detail {
// Same-variable picks come from These, different-variable picks from Others.
inline const Deck& designated_pile(const GameState& state, Attribute observed) {
  return observed == state.last ? state.these : state.others;
}
}  // namespace detail

/// One observation: pick uniformly from the designated pile, read which cell
/// the card's value falls in, then regroup the whole deck around that cell.
/// Picks with identical consequences merge into one exact branch.
inline Dist<std::pair<std::string, GameState>> observe(const GameState& state,
                                                       const ValuePartition& partition) {
  const Deck& pile = detail::designated_pile(state, partition.attribute());
  if (pile.empty())
    throw EmptyPile("observation of " + attribute_name(partition.attribute()) +
                    " picks from an empty pile");
  const Deck full = state.full_deck();
  std::vector<Dist<std::pair<std::string, GameState>>::Entry> raw;
  const Rational each(1, static_cast<long long>(pile.size()));
  for (const Card& picked : pile.cards()) {
    const auto& cell = partition.cell_containing(picked.value(partition.attribute()));
    GameState next{full.matching(partition.attribute(), cell.values),
                   full.excluding(partition.attribute(), cell.values), partition.attribute()};
    raw.emplace_back(std::make_pair(cell.label, std::move(next)), each);
  }
  return Dist<std::pair<std::string, GameState>>::merged(std::move(raw));
}

struct PostSelection {
  Rational pass_probability;
  std::optional<GameState> pass_state;
};

/// Fine observation of `attribute` used as a filter: pass iff the picked
/// card carries exactly `value`.
inline PostSelection post_select(const GameState& state, Attribute attribute, char value) {
  const auto fine = observe(state, ValuePartition::fine(attribute));
  const std::string target(1, value);
  PostSelection result;
  for (const auto& [branch, w] : fine.entries()) {
    if (branch.first == target) {
      result.pass_probability = w;
      result.pass_state = branch.second;
    }
  }
  return result;
}

/// Full scenario: deck, preparation, ordered looks, final filter.
struct CardExperiment {
  Deck deck;
  Attribute prep_attribute;
  std::vector<char> prep_values;
  std::vector<ValuePartition> looks;
  Attribute post_attribute;
  char post_value;
};

/// Exact joint law over (look outcomes, pass), shaped like the quantum
/// engine's report so the two sit side by side.
inline ExactReport run_card_experiment(const CardExperiment& exp) {
  struct Branch {
    std::vector<std::string> outcomes;
    GameState state;
    bool operator==(const Branch&) const = default;
    auto operator<=>(const Branch&) const = default;
  };
  auto frontier =
      Dist<Branch>::certain(Branch{{}, prepare(exp.deck, exp.prep_attribute, exp.prep_values)});
  for (std::size_t i = 0; i < exp.looks.size(); ++i) {
    const auto& look = exp.looks[i];
    frontier = chain(frontier, [&](const Branch& b) {
      try {
        return map(observe(b.state, look), [&b](const std::pair<std::string, GameState>& r) {
          Branch next{b.outcomes, r.second};
          next.outcomes.push_back(r.first);
          return next;
        });
      } catch (const EmptyPile& e) {
        std::string where = "look " + std::to_string(i + 1) + " after [";
        for (std::size_t k = 0; k < b.outcomes.size(); ++k)
          where += (k ? " " : "") + b.outcomes[k];
        throw EmptyPile(where + "]: " + e.what());
      }
    });
  }
  auto joint = chain(frontier, [&exp](const Branch& b) {
    const auto post = post_select(b.state, exp.post_attribute, exp.post_value);
    std::vector<Dist<RunKey>::Entry> raw;
    raw.emplace_back(RunKey{b.outcomes, true}, post.pass_probability);
    raw.emplace_back(RunKey{b.outcomes, false}, Rational(1) - post.pass_probability);
    return Dist<RunKey>::merged(std::move(raw));
  });
  return ExactReport(std::move(joint));
}

/// One simulated run. Picks index into the sorted pile, so the sampled and
/// enumerated processes agree draw for draw.
inline RunKey sample_card_run(const CardExperiment& exp, RandomSource& rng) {
  GameState state = prepare(exp.deck, exp.prep_attribute, exp.prep_values);
  const Deck full = state.full_deck();
  std::vector<std::string> outcomes;
  for (const auto& look : exp.looks) {
    const Deck& pile = detail::designated_pile(state, look.attribute());
    if (pile.empty()) throw EmptyPile("sampled run reached an empty pile");
    const Card picked = pile.cards()[rng.uniform_below(pile.size())];
    const auto& cell = look.cell_containing(picked.value(look.attribute()));
    outcomes.push_back(cell.label);
    state = GameState{full.matching(look.attribute(), cell.values),
                      full.excluding(look.attribute(), cell.values), look.attribute()};
  }
  const Deck& pile = detail::designated_pile(state, exp.post_attribute);
  if (pile.empty()) throw EmptyPile("post-selection picks from an empty pile");
  const Card picked = pile.cards()[rng.uniform_below(pile.size())];
  return RunKey{std::move(outcomes), picked.value(exp.post_attribute) == exp.post_value};
}

}  // namespace paradox::cards
