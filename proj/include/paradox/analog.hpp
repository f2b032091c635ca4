#pragma once

#include <compare>
#include <optional>
#include <string>

#include "paradox/dist.hpp"
#include "paradox/errors.hpp"

namespace paradox::analog {

// ---------------------------------------------------------------------------
// Ad hoc three-box game: an agent moves the ball so the post-selection fails
// exactly when the search does.
// ---------------------------------------------------------------------------

struct AdHocState {
  int ball = 1;  // box index, 1..3

  friend bool operator==(const AdHocState&, const AdHocState&) = default;
  friend auto operator<=>(const AdHocState&, const AdHocState&) = default;
};

inline AdHocState make_adhoc(int ball) {
  if (ball < 1 || ball > 3) throw ValidationError("ball must sit in box 1, 2 or 3");
  return AdHocState{ball};
}

struct AdHocOpening {
  bool found;
  AdHocState state;
};

/// Opens box 1 or 2. A miss moves the ball to box 3; a hit leaves it alone.
/// Boxes 1 and 2 are treated symmetrically; opening box 3 has no defined rule.
inline AdHocOpening adhoc_open(AdHocState state, int box) {
  if (box != 1 && box != 2) throw UnsupportedOpening("only boxes 1 and 2 can be opened");
  if (state.ball == box) return {true, state};
  return {false, AdHocState{3}};
}

/// Post-selection: "not in the third box".
inline bool adhoc_post(AdHocState state) { return state.ball != 3; }

// ---------------------------------------------------------------------------
// Leifer-Spekkens box: the ball always has both coordinates, so observation
// can disturb (shake), not disturb (tilt), or simply read them off (x-ray).
// ---------------------------------------------------------------------------

enum class Half : char { Left = 'L', Right = 'R' };
enum class Depth : char { Front = 'F', Rear = 'R' };

struct LSBoxState {
  Half x = Half::Left;
  Depth y = Depth::Front;

  friend bool operator==(const LSBoxState&, const LSBoxState&) = default;
  friend auto operator<=>(const LSBoxState&, const LSBoxState&) = default;
};

struct ShakeResult {
  bool rattle;
  Dist<LSBoxState> state;
};

/// Shakes one half. A rattle confirms presence and randomizes front/rear;
/// silence leaves the state untouched.
inline ShakeResult ls_shake(const LSBoxState& state, Half half) {
  if (state.x != half) return {false, Dist<LSBoxState>::certain(state)};
  return {true, Dist<LSBoxState>::uniform({LSBoxState{state.x, Depth::Front},
                                           LSBoxState{state.x, Depth::Rear}})};
}

struct TiltResult {
  bool present;
  std::optional<Depth> y_read;
  LSBoxState state;
};

/// Tilts one half and times the fall: reads both presence and depth, then
/// returns the ball to its place. No disturbance.
inline TiltResult ls_tilt(const LSBoxState& state, Half half) {
  if (state.x != half) return {false, std::nullopt, state};
  return {true, state.y, state};
}

/// Reads both coordinates outright; the state is untouched.
inline std::pair<Half, Depth> ls_xray(const LSBoxState& state) { return {state.x, state.y}; }

inline std::string half_name(Half h) { return h == Half::Left ? "Left" : "Right"; }
inline std::string depth_name(Depth d) { return d == Depth::Front ? "Front" : "Rear"; }

}  // namespace paradox::analog
