#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "paradox/analog.hpp"
#include "paradox/cards.hpp"
#include "paradox/errors.hpp"
#include "paradox/quantum.hpp"
#include "paradox/random.hpp"
#include "paradox/report.hpp"
#include "paradox/slits.hpp"

namespace paradox {

using Json = nlohmann::ordered_json;

enum class Mode { Exact, MonteCarlo, Both };

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Exact: return "exact";
    case Mode::MonteCarlo: return "montecarlo";
    case Mode::Both: return "both";
  }
  return "exact";
}

// ---------------------------------------------------------------------------
// Scenario: one experiment description, engine-specific payload included.
// ---------------------------------------------------------------------------

struct QuantumConfig {
  quantum::PpsExperiment experiment;
};

struct CardConfig {
  cards::CardExperiment experiment;
};

struct AdHocConfig {
  std::optional<int> initial;  // pinned box; empty = uniform over 1..3
  int open_box = 1;
};

struct LsProbe {
  enum class Op { Shake, Tilt, Xray } op = Op::Shake;
  analog::Half half = analog::Half::Left;
};

struct LsConfig {
  std::optional<analog::LSBoxState> initial;  // empty = uniform over the four states
  std::vector<LsProbe> probes;
};

struct SlitConfig {
  slits::SlitGeometry geometry;
  std::optional<int> detector_at;  // empty = no which-path detector
};

struct Scenario {
  std::string name;  // preset name, or "custom"
  Mode mode = Mode::Exact;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  std::string anchor;  // provenance note for built-in presets, carried into reports
  std::variant<std::monostate, QuantumConfig, CardConfig, AdHocConfig, LsConfig, SlitConfig>
      config;

  std::string engine_name() const {
    switch (config.index()) {
      case 1: return "quantum";
      case 2: return "card";
      case 3: return "adhoc";
      case 4: return "lsbox";
      case 5: return "slit";
    }
    return "unset";
  }
};

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

struct EventComparison {
  RunKey key;
  std::string p_exact;  // "num/den" when the reference is exact, else empty
  double p = 0.0;
  std::uint64_t count = 0;
  double freq = 0.0;
  double z = 0.0;
  bool hard_failure = false;  // an impossible (p=0) or sure (p=1) event missed
};

struct Comparison {
  std::vector<EventComparison> events;
  double max_abs_z = 0.0;
  bool hard_failure = false;
};

struct ScenarioReport {
  std::string scenario_name;
  std::string engine;
  Mode mode = Mode::Exact;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string anchor;

  std::optional<ExactReport> exact;             // rational engines
  std::optional<std::map<RunKey, double>> analytic;  // slit engine
  std::optional<McTally> mc;
  std::optional<Comparison> comparison;  // derived; filled in "both" mode

  friend bool operator==(const ScenarioReport& a, const ScenarioReport& b) {
    return a.scenario_name == b.scenario_name && a.engine == b.engine && a.mode == b.mode &&
           a.trials == b.trials && a.seed == b.seed && a.anchor == b.anchor &&
           a.exact == b.exact && a.analytic == b.analytic && a.mc == b.mc;
  }
};

// ---------------------------------------------------------------------------
// Parsing.
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& pointer, const std::string& why) {
  throw ParseError("at " + (pointer.empty() ? "/" : pointer) + ": " + why);
}

inline const Json& require(const Json& doc, const std::string& key, const std::string& pointer) {
  const auto it = doc.find(key);
  if (it == doc.end()) parse_fail(pointer, "missing key '" + key + "'");
  return *it;
}

inline std::string get_string(const Json& v, const std::string& pointer) {
  if (!v.is_string()) parse_fail(pointer, "expected a string");
  return v.get<std::string>();
}

inline std::uint64_t get_uint(const Json& v, const std::string& pointer) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    parse_fail(pointer, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline Rational parse_rational(const Json& v, const std::string& pointer) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const ParseError& e) {
      parse_fail(pointer, e.what());
    }
  }
  parse_fail(pointer, "expected an integer or a 'num/den' string");
}

inline ComplexRational parse_amplitude(const Json& v, const std::string& pointer) {
  if (v.is_object()) {
    ComplexRational z;
    if (v.contains("re")) z.re = parse_rational(v.at("re"), pointer + "/re");
    if (v.contains("im")) z.im = parse_rational(v.at("im"), pointer + "/im");
    return z;
  }
  return ComplexRational(parse_rational(v, pointer));
}

inline quantum::AmplitudeVector parse_state(const Json& v, const std::vector<std::string>& basis,
                                            const std::string& pointer) {
  if (!v.is_array()) parse_fail(pointer, "expected an array of amplitudes");
  if (v.size() != basis.size())
    parse_fail(pointer, "expected " + std::to_string(basis.size()) + " amplitudes");
  std::vector<ComplexRational> amps;
  for (std::size_t i = 0; i < v.size(); ++i)
    amps.push_back(parse_amplitude(v[i], pointer + "/" + std::to_string(i)));
  try {
    return quantum::AmplitudeVector(basis, std::move(amps));
  } catch (const Error& e) {
    throw ValidationError(std::string(e.what()) + " (" + pointer + ")");
  }
}

inline quantum::Measurement parse_stage(const Json& v, const std::vector<std::string>& basis,
                                        const std::string& pointer) {
  if (!v.is_array()) parse_fail(pointer, "expected an array of cells");
  std::vector<quantum::MeasurementCell> cells;
  for (std::size_t c = 0; c < v.size(); ++c) {
    const Json& cell = v[c];
    if (!cell.is_array() || cell.empty())
      parse_fail(pointer + "/" + std::to_string(c), "expected a nonempty array of basis labels");
    std::vector<std::string> members;
    for (std::size_t i = 0; i < cell.size(); ++i)
      members.push_back(get_string(cell[i], pointer + "/" + std::to_string(c)));
    std::string label = members[0];
    for (std::size_t i = 1; i < members.size(); ++i) label += "+" + members[i];
    cells.push_back({std::move(label), std::move(members)});
  }
  try {
    quantum::Measurement m(std::move(cells));
    m.validate_against(basis);
    return m;
  } catch (const Error& e) {
    throw ValidationError(std::string(e.what()) + " (" + pointer + ")");
  }
}

inline QuantumConfig parse_quantum(const Json& doc) {
  std::vector<std::string> basis;
  if (doc.contains("basis")) {
    for (std::size_t i = 0; i < doc.at("basis").size(); ++i)
      basis.push_back(get_string(doc.at("basis")[i], "/basis"));
  } else {
    const Json& pre = require(doc, "pre", "");
    if (!pre.is_array()) parse_fail("/pre", "expected an array");
    for (std::size_t i = 0; i < pre.size(); ++i) basis.push_back("p" + std::to_string(i + 1));
  }
  auto pre = parse_state(require(doc, "pre", ""), basis, "/pre");
  auto post = parse_state(require(doc, "post", ""), basis, "/post");
  std::vector<quantum::Measurement> stages;
  if (doc.contains("stages")) {
    const Json& list = doc.at("stages");
    if (!list.is_array()) parse_fail("/stages", "expected an array of stages");
    for (std::size_t i = 0; i < list.size(); ++i)
      stages.push_back(parse_stage(list[i], basis, "/stages/" + std::to_string(i)));
  } else if (doc.contains("stage")) {
    stages.push_back(parse_stage(doc.at("stage"), basis, "/stage"));
  } else if (doc.contains("open_box")) {
    const auto box = get_uint(doc.at("open_box"), "/open_box");
    if (box < 1 || box > basis.size())
      throw ValidationError("open_box must name one of the " + std::to_string(basis.size()) +
                            " boxes");
    stages.push_back(quantum::Measurement::opening(basis, basis[box - 1]));
  }
  return QuantumConfig{quantum::PpsExperiment{std::move(pre), std::move(stages), std::move(post)}};
}

inline cards::Attribute parse_attribute(const Json& v, const std::string& pointer) {
  const std::string s = get_string(v, pointer);
  if (s == "Face") return cards::Attribute::Face;
  if (s == "Suit") return cards::Attribute::Suit;
  parse_fail(pointer, "attribute must be 'Face' or 'Suit'");
}

inline std::vector<char> parse_values(const Json& v, cards::Attribute a,
                                      const std::string& pointer) {
  if (!v.is_array() || v.empty()) parse_fail(pointer, "expected a nonempty array of values");
  std::vector<char> values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string s = get_string(v[i], pointer);
    const auto& range = cards::value_range(a);
    if (s.size() != 1 || !std::count(range.begin(), range.end(), s[0]))
      parse_fail(pointer + "/" + std::to_string(i),
                 "'" + s + "' is not a " + cards::attribute_name(a) + " value");
    values.push_back(s[0]);
  }
  return values;
}

inline CardConfig parse_card(const Json& doc) {
  cards::Deck deck = cards::Deck::standard();
  if (doc.contains("deck")) {
    const Json& d = doc.at("deck");
    if (!d.is_array() || d.empty()) parse_fail("/deck", "expected a nonempty array of card labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < d.size(); ++i)
      labels.push_back(get_string(d[i], "/deck/" + std::to_string(i)));
    deck = cards::Deck::parse(labels);
  }

  cards::Attribute prep_attr = cards::Attribute::Face;
  std::vector<char> prep_values{'Q'};
  if (doc.contains("prep")) {
    const Json& p = doc.at("prep");
    if (p.is_string()) {
      const std::string s = p.get<std::string>();
      if (s == "Q") {
        prep_values = {'Q'};
      } else if (s == "notJ") {
        prep_values = {'K', 'Q'};
      } else {
        parse_fail("/prep", "named preparations are 'Q' and 'notJ'");
      }
    } else if (p.is_object()) {
      prep_attr = parse_attribute(require(p, "attribute", "/prep"), "/prep/attribute");
      prep_values = parse_values(require(p, "values", "/prep"), prep_attr, "/prep/values");
    } else {
      parse_fail("/prep", "expected a name or {attribute, values}");
    }
  }

  std::vector<cards::ValuePartition> looks;
  bool looks_given = false;
  if (doc.contains("looks")) {
    looks_given = true;
    const Json& list = doc.at("looks");
    if (!list.is_array()) parse_fail("/looks", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string pointer = "/looks/" + std::to_string(i);
      const Json& l = list[i];
      if (!l.is_object()) parse_fail(pointer, "expected an object");
      const auto attr = parse_attribute(require(l, "attribute", pointer), pointer + "/attribute");
      if (l.contains("fine") && l.at("fine").is_boolean() && l.at("fine").get<bool>()) {
        looks.push_back(cards::ValuePartition::fine(attr));
      } else {
        const auto values = parse_values(require(l, "values", pointer), attr, pointer + "/values");
        try {
          looks.push_back(cards::ValuePartition::look_for(attr, values));
        } catch (const Error& e) {
          throw ValidationError(std::string(e.what()) + " (" + pointer + ")");
        }
      }
    }
  } else if (doc.contains("look")) {
    looks_given = true;
    const std::string s = get_string(doc.at("look"), "/look");
    if (s == "fine") {
      looks.push_back(cards::ValuePartition::fine(cards::Attribute::Suit));
    } else if (s != "none") {
      const auto& range = cards::value_range(cards::Attribute::Suit);
      if (s.size() != 1 || !std::count(range.begin(), range.end(), s[0]))
        parse_fail("/look", "'" + s + "' is not a Suit value, 'fine', or 'none'");
      looks.push_back(cards::ValuePartition::look_for(cards::Attribute::Suit, {s[0]}));
    }
  }
  if (!looks_given) looks.push_back(cards::ValuePartition::look_for(cards::Attribute::Suit, {'S'}));

  cards::Attribute post_attr = cards::Attribute::Face;
  char post_value = 'K';
  if (doc.contains("post")) {
    const Json& p = doc.at("post");
    if (!p.is_object()) parse_fail("/post", "expected {attribute, value}");
    post_attr = parse_attribute(require(p, "attribute", "/post"), "/post/attribute");
    const auto values = parse_values(Json::array({require(p, "value", "/post")}), post_attr,
                                     "/post/value");
    post_value = values[0];
  }

  if (deck.matching(prep_attr, prep_values).empty())
    throw ValidationError("preparation matches no card in the deck");
  return CardConfig{cards::CardExperiment{std::move(deck), prep_attr, std::move(prep_values),
                                          std::move(looks), post_attr, post_value}};
}

inline AdHocConfig parse_adhoc(const Json& doc) {
  AdHocConfig cfg;
  if (doc.contains("open_box")) {
    const auto box = get_uint(doc.at("open_box"), "/open_box");
    if (box != 1 && box != 2) throw ValidationError("adhoc open_box must be 1 or 2");
    cfg.open_box = static_cast<int>(box);
  }
  if (doc.contains("initial") && !(doc.at("initial").is_string())) {
    const auto ball = get_uint(doc.at("initial"), "/initial");
    if (ball < 1 || ball > 3) throw ValidationError("initial ball must sit in box 1, 2 or 3");
    cfg.initial = static_cast<int>(ball);
  } else if (doc.contains("initial") && get_string(doc.at("initial"), "/initial") != "uniform") {
    parse_fail("/initial", "expected 'uniform' or a box index");
  }
  return cfg;
}

inline analog::Half parse_half(const Json& v, const std::string& pointer) {
  const std::string s = get_string(v, pointer);
  if (s == "Left") return analog::Half::Left;
  if (s == "Right") return analog::Half::Right;
  parse_fail(pointer, "half must be 'Left' or 'Right'");
}

inline LsConfig parse_lsbox(const Json& doc) {
  LsConfig cfg;
  if (doc.contains("initial") && doc.at("initial").is_object()) {
    const Json& init = doc.at("initial");
    analog::LSBoxState s;
    s.x = parse_half(require(init, "x", "/initial"), "/initial/x");
    const std::string y = get_string(require(init, "y", "/initial"), "/initial/y");
    if (y == "Front") {
      s.y = analog::Depth::Front;
    } else if (y == "Rear") {
      s.y = analog::Depth::Rear;
    } else {
      parse_fail("/initial/y", "depth must be 'Front' or 'Rear'");
    }
    cfg.initial = s;
  } else if (doc.contains("initial") &&
             get_string(doc.at("initial"), "/initial") != "uniform") {
    parse_fail("/initial", "expected 'uniform' or {x, y}");
  }
  if (doc.contains("probes")) {
    const Json& list = doc.at("probes");
    if (!list.is_array()) parse_fail("/probes", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string pointer = "/probes/" + std::to_string(i);
      const Json& p = list[i];
      if (!p.is_object()) parse_fail(pointer, "expected an object");
      LsProbe probe;
      const std::string op = get_string(require(p, "op", pointer), pointer + "/op");
      if (op == "shake") {
        probe.op = LsProbe::Op::Shake;
      } else if (op == "tilt") {
        probe.op = LsProbe::Op::Tilt;
      } else if (op == "xray") {
        probe.op = LsProbe::Op::Xray;
      } else {
        parse_fail(pointer + "/op", "op must be 'shake', 'tilt' or 'xray'");
      }
      if (probe.op != LsProbe::Op::Xray)
        probe.half = parse_half(require(p, "half", pointer), pointer + "/half");
      cfg.probes.push_back(probe);
    }
  } else {
    cfg.probes = {{LsProbe::Op::Shake, analog::Half::Left},
                  {LsProbe::Op::Tilt, analog::Half::Left}};
  }
  return cfg;
}

inline SlitConfig parse_slit(const Json& doc) {
  double a = 1000.0;
  double lambda = 1.0;
  if (doc.contains("a")) a = doc.at("a").get<double>();
  if (doc.contains("lambda")) lambda = doc.at("lambda").get<double>();
  double L;
  try {
    L = doc.contains("L") ? doc.at("L").get<double>() : slits::solve_detector_distance(a, lambda);
    SlitConfig cfg{slits::SlitGeometry::make(a, lambda, L), std::nullopt};
    if (doc.contains("detector_at") && !doc.at("detector_at").is_null()) {
      if (doc.at("detector_at").is_string()) {
        if (get_string(doc.at("detector_at"), "/detector_at") != "none")
          parse_fail("/detector_at", "expected 1, 2 or 'none'");
      } else {
        const auto at = get_uint(doc.at("detector_at"), "/detector_at");
        if (at != 1 && at != 2)
          throw ValidationError("which-path detector sits at slit 1 or 2");
        cfg.detector_at = static_cast<int>(at);
      }
    }
    return cfg;
  } catch (const GeometryViolation& e) {
    throw ValidationError(e.what());
  }
}

inline Json preset_document(const std::string& name) {
  if (name == "three-box") {
    return Json{{"engine", "quantum"},
                {"pre", {"1", "1", "1"}},
                {"post", {"1", "1", "-1"}},
                {"open_box", 1}};
  }
  if (name == "card-game") {
    return Json{{"engine", "card"}, {"prep", "Q"}, {"look", "S"},
                {"post", {{"attribute", "Face"}, {"value", "K"}}}};
  }
  if (name == "card-game-notJ") {
    return Json{{"engine", "card"}, {"prep", "notJ"}, {"look", "S"},
                {"post", {{"attribute", "Face"}, {"value", "K"}}}};
  }
  if (name == "adhoc") {
    return Json{{"engine", "adhoc"}, {"open_box", 1}, {"initial", "uniform"}};
  }
  if (name == "ls-box") {
    return Json{{"engine", "lsbox"}, {"initial", "uniform"}};
  }
  if (name == "three-slit") {
    return Json{{"engine", "slit"}, {"a", 1000.0}, {"lambda", 1.0}, {"detector_at", 1}};
  }
  throw ParseError("unknown preset '" + name + "'");
}

inline std::string preset_anchor(const std::string& name) {
  if (name == "three-box") return "Appendix A, Eq. (2)";
  if (name == "card-game") return "Sec. 2, card-game observation rule";
  if (name == "card-game-notJ") return "Sec. 6.3 footnote, not-J preparation";
  if (name == "adhoc") return "Sec. 3, ad hoc three-box";
  if (name == "ls-box") return "Sec. 5, Leifer-Spekkens box";
  if (name == "three-slit") return "Appendix B, three-slit Young apparatus";
  return "";
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"three-box", "card-game", "card-game-notJ",
                                                 "adhoc",     "ls-box",    "three-slit"};
  return names;
}

/// Parses one scenario document. A "scenario" key names a preset whose
/// defaults the remaining keys override; otherwise "engine" selects the
/// engine and all parameters are explicit.
inline Scenario parse_scenario(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top level must be a JSON object");

  Scenario s;
  s.name = "custom";
  if (doc.contains("scenario")) {
    s.name = detail::get_string(doc.at("scenario"), "/scenario");
    Json merged = detail::preset_document(s.name);
    for (const auto& [key, value] : doc.items())
      if (key != "scenario") merged[key] = value;
    doc = std::move(merged);
    s.anchor = detail::preset_anchor(s.name);
  }

  if (doc.contains("mode")) {
    const std::string m = detail::get_string(doc.at("mode"), "/mode");
    if (m == "exact") {
      s.mode = Mode::Exact;
    } else if (m == "montecarlo" || m == "mc") {
      s.mode = Mode::MonteCarlo;
    } else if (m == "both") {
      s.mode = Mode::Both;
    } else {
      detail::parse_fail("/mode", "mode must be 'exact', 'montecarlo'/'mc' or 'both'");
    }
  }
  if (doc.contains("trials")) {
    s.trials = detail::get_uint(doc.at("trials"), "/trials");
    if (s.trials == 0) throw ValidationError("trials must be positive");
  }
  if (doc.contains("seed")) s.seed = detail::get_uint(doc.at("seed"), "/seed");

  const std::string engine = detail::get_string(detail::require(doc, "engine", ""), "/engine");
  if (engine == "quantum") {
    s.config = detail::parse_quantum(doc);
  } else if (engine == "card") {
    s.config = detail::parse_card(doc);
  } else if (engine == "adhoc") {
    s.config = detail::parse_adhoc(doc);
  } else if (engine == "lsbox") {
    s.config = detail::parse_lsbox(doc);
  } else if (engine == "slit") {
    s.config = detail::parse_slit(doc);
  } else {
    detail::parse_fail("/engine", "engine must be quantum, card, adhoc, lsbox or slit");
  }
  return s;
}

/// Default seed when neither the document nor the caller pins one:
/// PARADOX_LAB_SEED from the environment, else 0.
inline std::uint64_t default_seed_from_env() {
  if (const char* env = std::getenv("PARADOX_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("PARADOX_LAB_SEED is not an unsigned integer");
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string ls_state_label(const analog::LSBoxState& s) {
  return analog::half_name(s.x) + "-" + analog::depth_name(s.y);
}

inline Dist<analog::LSBoxState> ls_initial_dist(const LsConfig& cfg) {
  if (cfg.initial) return Dist<analog::LSBoxState>::certain(*cfg.initial);
  using analog::Depth;
  using analog::Half;
  return Dist<analog::LSBoxState>::uniform(
      {analog::LSBoxState{Half::Left, Depth::Front}, analog::LSBoxState{Half::Left, Depth::Rear},
       analog::LSBoxState{Half::Right, Depth::Front},
       analog::LSBoxState{Half::Right, Depth::Rear}});
}

// Outcome label plus successor states for one probe.
inline Dist<std::pair<std::string, analog::LSBoxState>> ls_probe_kernel(
    const analog::LSBoxState& state, const LsProbe& probe) {
  using Branch = std::pair<std::string, analog::LSBoxState>;
  switch (probe.op) {
    case LsProbe::Op::Shake: {
      const auto r = analog::ls_shake(state, probe.half);
      std::vector<Dist<Branch>::Entry> raw;
      for (const auto& [next, w] : r.state.entries())
        raw.emplace_back(Branch{r.rattle ? "rattle" : "silent", next}, w);
      return Dist<Branch>::merged(std::move(raw));
    }
    case LsProbe::Op::Tilt: {
      const auto r = analog::ls_tilt(state, probe.half);
      const std::string label = r.present ? (r.y_read == analog::Depth::Front ? "front" : "rear")
                                          : "absent";
      return Dist<Branch>::certain({label, r.state});
    }
    case LsProbe::Op::Xray: {
      const auto coords = analog::ls_xray(state);
      return Dist<Branch>::certain(
          {analog::half_name(coords.first) + "-" + analog::depth_name(coords.second), state});
    }
  }
  throw Error("unreachable probe op");
}

inline ExactReport run_adhoc_exact(const AdHocConfig& cfg) {
  auto initial = cfg.initial
                     ? Dist<analog::AdHocState>::certain(analog::make_adhoc(*cfg.initial))
                     : Dist<analog::AdHocState>::uniform(
                           {analog::AdHocState{1}, analog::AdHocState{2}, analog::AdHocState{3}});
  auto joint = map(initial, [&cfg](const analog::AdHocState& s) {
    const auto opened = analog::adhoc_open(s, cfg.open_box);
    return RunKey{{opened.found ? "found" : "not_found"}, analog::adhoc_post(opened.state)};
  });
  return ExactReport(std::move(joint));
}

inline ExactReport run_lsbox_exact(const LsConfig& cfg) {
  struct Branch {
    std::vector<std::string> outcomes;
    analog::LSBoxState state;
    bool operator==(const Branch&) const = default;
    auto operator<=>(const Branch&) const = default;
  };
  auto frontier = map(ls_initial_dist(cfg), [](const analog::LSBoxState& s) {
    return Branch{{}, s};
  });
  for (const auto& probe : cfg.probes) {
    frontier = chain(frontier, [&probe](const Branch& b) {
      return map(ls_probe_kernel(b.state, probe),
                 [&b](const std::pair<std::string, analog::LSBoxState>& r) {
                   Branch next{b.outcomes, r.second};
                   next.outcomes.push_back(r.first);
                   return next;
                 });
    });
  }
  // No post-selection here: every run "passes".
  auto joint = map(frontier, [](const Branch& b) { return RunKey{b.outcomes, true}; });
  return ExactReport(std::move(joint));
}

inline RunKey sample_adhoc_run(const AdHocConfig& cfg, RandomSource& rng) {
  const int ball = cfg.initial ? *cfg.initial : static_cast<int>(rng.uniform_below(3)) + 1;
  const auto opened = analog::adhoc_open(analog::AdHocState{ball}, cfg.open_box);
  return RunKey{{opened.found ? "found" : "not_found"}, analog::adhoc_post(opened.state)};
}

inline RunKey sample_lsbox_run(const LsConfig& cfg, RandomSource& rng) {
  analog::LSBoxState state;
  if (cfg.initial) {
    state = *cfg.initial;
  } else {
    const auto i = rng.uniform_below(std::uint64_t{4});
    state.x = (i < 2) ? analog::Half::Left : analog::Half::Right;
    state.y = (i % 2 == 0) ? analog::Depth::Front : analog::Depth::Rear;
  }
  std::vector<std::string> outcomes;
  for (const auto& probe : cfg.probes) {
    auto branches = ls_probe_kernel(state, probe);
    const auto& [label, next] = branches.sample(rng);
    outcomes.push_back(label);
    state = next;
  }
  return RunKey{std::move(outcomes), true};
}

inline std::map<RunKey, double> run_slit_analytic(const SlitConfig& cfg) {
  std::map<RunKey, double> joint;
  if (!cfg.detector_at) {
    const double p =
        slits::detection_probability(cfg.geometry, slits::PathSetup::open({1, 2, 3}));
    joint[RunKey{{}, true}] = p;
    joint[RunKey{{}, false}] = 1.0 - p;
    return joint;
  }
  const auto r = slits::coincidence_experiment(cfg.geometry, *cfg.detector_at);
  joint[RunKey{{"d"}, true}] = r.p_D_and_d;
  joint[RunKey{{"d"}, false}] = r.p_d_fires - r.p_D_and_d;
  joint[RunKey{{"silent"}, true}] = r.p_D_and_not_d;
  joint[RunKey{{"silent"}, false}] = (1.0 - r.p_d_fires) - r.p_D_and_not_d;
  return joint;
}

}  // namespace detail

/// Runs the scenario in its requested mode(s). Exact mode chains the engine's
/// enumeration; Monte Carlo mode samples `trials` seeded runs; "both" also
/// fills the per-event z comparison.
ScenarioReport run_scenario(const Scenario& s);

/// Per-event z-scores of a Monte Carlo report against the matching exact
/// report. Impossible (p=0) and sure (p=1) events must match exactly;
/// anything else gets z = (freq - p) * sqrt(N) / sqrt(p (1-p)).
Comparison compare_mc_exact(const ScenarioReport& exact_report, const ScenarioReport& mc_report);

/// Renders a report as an aligned text table or as stable-key-order JSON.
enum class RenderFormat { Table, Json };
std::string render(const ScenarioReport& report, RenderFormat format);

/// Inverse of render(..., Json) for everything that is not derived:
/// metadata, exact/analytic laws, Monte Carlo tallies.
ScenarioReport parse_report(const std::string& text);

// ---------------------------------------------------------------------------
// Implementation.
// ---------------------------------------------------------------------------

namespace detail {

inline Comparison compare_tally(
    const std::optional<ExactReport>& exact,
    const std::optional<std::map<RunKey, double>>& analytic, const McTally& mc) {
  std::map<RunKey, std::pair<double, std::string>> reference;
  if (exact) {
    for (const auto& [key, w] : exact->joint().entries())
      reference[key] = {w.to_double(), w.str()};
    // Impossible complements of observed sequences take part too.
    for (const auto& seq : exact->outcome_sequences())
      for (bool pass : {false, true}) {
        const RunKey key{seq, pass};
        if (!reference.count(key)) reference[key] = {0.0, Rational(0).str()};
      }
  } else if (analytic) {
    for (const auto& [key, p] : *analytic) reference[key] = {p, ""};
  }
  for (const auto& [key, n] : mc.counts)
    if (!reference.count(key))
      reference[key] = {0.0, exact ? Rational(0).str() : std::string()};

  Comparison cmp;
  const double n = static_cast<double>(mc.trials);
  for (const auto& [key, ref] : reference) {
    EventComparison ev;
    ev.key = key;
    ev.p = ref.first;
    ev.p_exact = ref.second;
    const auto it = mc.counts.find(key);
    ev.count = (it == mc.counts.end()) ? 0 : it->second;
    ev.freq = static_cast<double>(ev.count) / n;
    if (ev.p == 0.0 || ev.p == 1.0) {
      ev.z = 0.0;
      ev.hard_failure = (ev.freq != ev.p);
    } else {
      ev.z = (ev.freq - ev.p) * std::sqrt(n) / std::sqrt(ev.p * (1.0 - ev.p));
    }
    cmp.hard_failure = cmp.hard_failure || ev.hard_failure;
    cmp.max_abs_z = std::max(cmp.max_abs_z, std::abs(ev.z));
    cmp.events.push_back(std::move(ev));
  }
  return cmp;
}

}  // namespace detail

inline ScenarioReport run_scenario(const Scenario& s) {
  ScenarioReport rep;
  rep.scenario_name = s.name;
  rep.engine = s.engine_name();
  rep.mode = s.mode;
  rep.trials = s.trials;
  rep.seed = s.seed;
  rep.anchor = s.anchor;

  const bool want_exact = s.mode != Mode::MonteCarlo;
  const bool want_mc = s.mode != Mode::Exact;

  if (want_exact) {
    if (const auto* q = std::get_if<QuantumConfig>(&s.config)) {
      rep.exact = quantum::run_pps(q->experiment);
    } else if (const auto* c = std::get_if<CardConfig>(&s.config)) {
      rep.exact = cards::run_card_experiment(c->experiment);
    } else if (const auto* a = std::get_if<AdHocConfig>(&s.config)) {
      rep.exact = detail::run_adhoc_exact(*a);
    } else if (const auto* l = std::get_if<LsConfig>(&s.config)) {
      rep.exact = detail::run_lsbox_exact(*l);
    } else if (const auto* sl = std::get_if<SlitConfig>(&s.config)) {
      rep.analytic = detail::run_slit_analytic(*sl);
    }
  }

  if (want_mc) {
    McTally tally;
    tally.trials = s.trials;
    tally.seed = s.seed;
    RandomSource rng(s.seed);
    for (std::uint64_t i = 0; i < s.trials; ++i) {
      RunKey key;
      if (const auto* q = std::get_if<QuantumConfig>(&s.config)) {
        key = quantum::sample_pps_run(q->experiment, rng);
      } else if (const auto* c = std::get_if<CardConfig>(&s.config)) {
        key = cards::sample_card_run(c->experiment, rng);
      } else if (const auto* a = std::get_if<AdHocConfig>(&s.config)) {
        key = detail::sample_adhoc_run(*a, rng);
      } else if (const auto* l = std::get_if<LsConfig>(&s.config)) {
        key = detail::sample_lsbox_run(*l, rng);
      } else if (const auto* sl = std::get_if<SlitConfig>(&s.config)) {
        key = slits::sample_coincidence_run(sl->geometry, sl->detector_at, rng);
      }
      ++tally.counts[key];
    }
    rep.mc = std::move(tally);
  }

  if (want_exact && want_mc)
    rep.comparison = detail::compare_tally(rep.exact, rep.analytic, *rep.mc);
  return rep;
}

inline Comparison compare_mc_exact(const ScenarioReport& exact_report,
                                   const ScenarioReport& mc_report) {
  if (exact_report.scenario_name != mc_report.scenario_name ||
      exact_report.engine != mc_report.engine)
    throw ValidationError("reports describe different scenarios");
  if (!exact_report.exact && !exact_report.analytic)
    throw ValidationError("first report carries no exact law");
  if (!mc_report.mc) throw ValidationError("second report carries no Monte Carlo tally");
  return detail::compare_tally(exact_report.exact, exact_report.analytic, *mc_report.mc);
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

namespace detail {

inline Json key_to_json(const RunKey& key) {
  Json j;
  j["outcomes"] = key.outcomes;
  j["pass"] = key.pass;
  return j;
}

inline RunKey key_from_json(const Json& j, const std::string& pointer) {
  RunKey key;
  const Json& outcomes = require(j, "outcomes", pointer);
  if (!outcomes.is_array()) parse_fail(pointer + "/outcomes", "expected an array");
  for (const auto& o : outcomes) key.outcomes.push_back(o.get<std::string>());
  key.pass = require(j, "pass", pointer).get<bool>();
  return key;
}

inline Json exact_to_json(const ExactReport& exact) {
  Json j;
  j["p_pass"] = exact.p_pass().str();
  Json joint = Json::array();
  for (const auto& seq : exact.outcome_sequences())
    for (bool pass : {true, false}) {
      Json row = key_to_json(RunKey{seq, pass});
      row["p"] = exact.prob(seq, pass).str();
      joint.push_back(std::move(row));
    }
  j["joint"] = std::move(joint);
  if (!exact.p_pass().is_zero()) {
    Json cond = Json::array();
    const auto conditional = exact.conditional_given_pass();
    for (const auto& [seq, w] : conditional.entries()) {
      Json row;
      row["outcomes"] = seq;
      row["p"] = w.str();
      cond.push_back(std::move(row));
    }
    j["conditional_given_pass"] = std::move(cond);
  }
  return j;
}

inline Json analytic_to_json(const std::map<RunKey, double>& joint) {
  Json j;
  double p_pass = 0.0;
  Json rows = Json::array();
  for (const auto& [key, p] : joint) {
    if (key.pass) p_pass += p;
    Json row = key_to_json(key);
    row["p"] = p;
    rows.push_back(std::move(row));
  }
  j["p_pass"] = p_pass;
  j["joint"] = std::move(rows);
  return j;
}

inline Json mc_to_json(const McTally& mc) {
  Json j;
  j["trials"] = mc.trials;
  j["seed"] = mc.seed;
  Json rows = Json::array();
  for (const auto& [key, count] : mc.counts) {
    Json row = key_to_json(key);
    row["count"] = count;
    row["freq"] = static_cast<double>(count) / static_cast<double>(mc.trials);
    rows.push_back(std::move(row));
  }
  j["joint"] = std::move(rows);
  return j;
}

inline Json comparison_to_json(const Comparison& cmp) {
  Json j;
  Json rows = Json::array();
  for (const auto& ev : cmp.events) {
    Json row = key_to_json(ev.key);
    if (!ev.p_exact.empty()) row["p_exact"] = ev.p_exact;
    row["p"] = ev.p;
    row["count"] = ev.count;
    row["freq"] = ev.freq;
    row["z"] = ev.z;
    if (ev.hard_failure) row["hard_failure"] = true;
    rows.push_back(std::move(row));
  }
  j["events"] = std::move(rows);
  j["max_abs_z"] = cmp.max_abs_z;
  j["hard_failure"] = cmp.hard_failure;
  return j;
}

inline std::string outcomes_text(const std::vector<std::string>& outcomes) {
  if (outcomes.empty()) return "-";
  std::string text;
  for (std::size_t i = 0; i < outcomes.size(); ++i) text += (i ? " " : "") + outcomes[i];
  return text;
}

}  // namespace detail

inline std::string render(const ScenarioReport& report, RenderFormat format) {
  if (format == RenderFormat::Json) {
    Json j;
    Json meta;
    meta["scenario"] = report.scenario_name;
    meta["engine"] = report.engine;
    meta["mode"] = mode_name(report.mode);
    meta["trials"] = report.trials;
    meta["seed"] = report.seed;
    if (!report.anchor.empty()) meta["anchor"] = report.anchor;
    j["metadata"] = std::move(meta);
    if (report.exact) j["exact"] = detail::exact_to_json(*report.exact);
    if (report.analytic) j["analytic"] = detail::analytic_to_json(*report.analytic);
    if (report.mc) j["montecarlo"] = detail::mc_to_json(*report.mc);
    if (report.comparison) j["comparison"] = detail::comparison_to_json(*report.comparison);
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "scenario: " << report.scenario_name << "  engine: " << report.engine
      << "  mode: " << mode_name(report.mode) << "\n";
  if (!report.anchor.empty()) out << "anchor:   " << report.anchor << "\n";

  std::size_t width = 8;
  const auto measure_key = [&width](const RunKey& key) {
    width = std::max(width, detail::outcomes_text(key.outcomes).size());
  };
  if (report.exact)
    for (const auto& [key, w] : report.exact->joint().entries()) measure_key(key);
  if (report.analytic)
    for (const auto& [key, p] : *report.analytic) measure_key(key);
  if (report.mc)
    for (const auto& [key, n] : report.mc->counts) measure_key(key);

  const auto row = [&](const std::string& outcomes, const std::string& pass,
                       const std::string& value) {
    out << "  " << std::left << std::setw(static_cast<int>(width) + 2) << outcomes
        << std::setw(6) << pass << value << "\n";
  };

  if (report.exact) {
    out << "exact joint (outcomes, pass -> probability):\n";
    for (const auto& seq : report.exact->outcome_sequences())
      for (bool pass : {true, false})
        row(detail::outcomes_text(seq), pass ? "pass" : "fail",
            report.exact->prob(seq, pass).str());
    out << "  P(pass) = " << report.exact->p_pass().str() << "\n";
    if (!report.exact->p_pass().is_zero()) {
      out << "conditional given pass:\n";
      const auto conditional = report.exact->conditional_given_pass();
      for (const auto& [seq, w] : conditional.entries())
        row(detail::outcomes_text(seq), "", w.str());
    }
  }
  if (report.analytic) {
    out << "analytic joint (floating point):\n";
    for (const auto& [key, p] : *report.analytic) {
      std::ostringstream v;
      v << std::setprecision(12) << p;
      row(detail::outcomes_text(key.outcomes), key.pass ? "pass" : "fail", v.str());
    }
  }
  if (report.mc) {
    out << "monte carlo (" << report.mc->trials << " trials, seed " << report.mc->seed << "):\n";
    for (const auto& [key, count] : report.mc->counts) {
      std::ostringstream v;
      v << count << "  (" << std::setprecision(6)
        << static_cast<double>(count) / static_cast<double>(report.mc->trials) << ")";
      row(detail::outcomes_text(key.outcomes), key.pass ? "pass" : "fail", v.str());
    }
  }
  if (report.comparison) {
    out << "comparison (z-scores vs exact):\n";
    for (const auto& ev : report.comparison->events) {
      std::ostringstream v;
      v << std::setprecision(4) << "p=" << ev.p << "  freq=" << ev.freq << "  z=" << ev.z;
      if (ev.hard_failure) v << "  HARD FAILURE";
      row(detail::outcomes_text(ev.key.outcomes), ev.key.pass ? "pass" : "fail", v.str());
    }
    out << "  max |z| = " << std::setprecision(4) << report.comparison->max_abs_z
        << (report.comparison->hard_failure ? "  (hard failure)" : "") << "\n";
  }
  return out.str();
}

inline ScenarioReport parse_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("not valid JSON: ") + e.what());
  }
  ScenarioReport rep;
  const Json& meta = detail::require(j, "metadata", "");
  rep.scenario_name = detail::get_string(detail::require(meta, "scenario", "/metadata"),
                                         "/metadata/scenario");
  rep.engine = detail::get_string(detail::require(meta, "engine", "/metadata"),
                                  "/metadata/engine");
  const std::string m = detail::get_string(detail::require(meta, "mode", "/metadata"),
                                           "/metadata/mode");
  rep.mode = (m == "exact") ? Mode::Exact : (m == "both") ? Mode::Both : Mode::MonteCarlo;
  rep.trials = detail::require(meta, "trials", "/metadata").get<std::uint64_t>();
  rep.seed = detail::require(meta, "seed", "/metadata").get<std::uint64_t>();
  if (meta.contains("anchor")) rep.anchor = meta.at("anchor").get<std::string>();

  if (j.contains("exact")) {
    const Json& e = j.at("exact");
    std::vector<Dist<RunKey>::Entry> raw;
    const Json& joint = detail::require(e, "joint", "/exact");
    for (std::size_t i = 0; i < joint.size(); ++i) {
      const std::string pointer = "/exact/joint/" + std::to_string(i);
      raw.emplace_back(detail::key_from_json(joint[i], pointer),
                       detail::parse_rational(detail::require(joint[i], "p", pointer),
                                              pointer + "/p"));
    }
    rep.exact = ExactReport(Dist<RunKey>::merged(std::move(raw)));
  }
  if (j.contains("analytic")) {
    std::map<RunKey, double> joint;
    const Json& rows = detail::require(j.at("analytic"), "joint", "/analytic");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string pointer = "/analytic/joint/" + std::to_string(i);
      joint[detail::key_from_json(rows[i], pointer)] =
          detail::require(rows[i], "p", pointer).get<double>();
    }
    rep.analytic = std::move(joint);
  }
  if (j.contains("montecarlo")) {
    const Json& m2 = j.at("montecarlo");
    McTally tally;
    tally.trials = detail::require(m2, "trials", "/montecarlo").get<std::uint64_t>();
    tally.seed = detail::require(m2, "seed", "/montecarlo").get<std::uint64_t>();
    const Json& rows = detail::require(m2, "joint", "/montecarlo");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string pointer = "/montecarlo/joint/" + std::to_string(i);
      tally.counts[detail::key_from_json(rows[i], pointer)] =
          detail::require(rows[i], "count", pointer).get<std::uint64_t>();
    }
    rep.mc = std::move(tally);
  }
  return rep;
}

}  // namespace paradox
