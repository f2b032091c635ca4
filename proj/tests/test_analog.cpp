#include <catch2/catch_amalgamated.hpp>

#include "paradox/analog.hpp"
#include "paradox/dist.hpp"

using namespace paradox;
using namespace paradox::analog;

TEST_CASE("ad hoc openings move a missed ball to box 3") {
  CHECK(adhoc_open(AdHocState{1}, 1).found);
  CHECK(adhoc_open(AdHocState{1}, 1).state == AdHocState{1});

  const auto missed = adhoc_open(AdHocState{2}, 1);
  CHECK_FALSE(missed.found);
  CHECK(missed.state == AdHocState{3});

  const auto already_third = adhoc_open(AdHocState{3}, 1);
  CHECK_FALSE(already_third.found);
  CHECK(already_third.state == AdHocState{3});

  CHECK_THROWS_AS(adhoc_open(AdHocState{1}, 3), UnsupportedOpening);
  CHECK_THROWS_AS(make_adhoc(0), ValidationError);
}

TEST_CASE("ad hoc post-selection passes exactly on a find") {
  CHECK(adhoc_post(AdHocState{1}));
  CHECK(adhoc_post(AdHocState{2}));
  CHECK_FALSE(adhoc_post(AdHocState{3}));

  // Exhaustive: for every start and either openable box, pass iff found.
  for (int start = 1; start <= 3; ++start)
    for (int box = 1; box <= 2; ++box) {
      const auto opened = adhoc_open(AdHocState{start}, box);
      INFO("start " << start << " open " << box);
      CHECK(adhoc_post(opened.state) == opened.found);
    }
}

TEST_CASE("shaking the occupied half rattles and randomizes depth") {
  const LSBoxState state{Half::Left, Depth::Front};
  const auto shaken = ls_shake(state, Half::Left);
  CHECK(shaken.rattle);
  CHECK(shaken.state.prob(LSBoxState{Half::Left, Depth::Front}) == Rational(1, 2));
  CHECK(shaken.state.prob(LSBoxState{Half::Left, Depth::Rear}) == Rational(1, 2));

  const auto silent = ls_shake(LSBoxState{Half::Right, Depth::Front}, Half::Left);
  CHECK_FALSE(silent.rattle);
  CHECK(silent.state == Dist<LSBoxState>::certain(LSBoxState{Half::Right, Depth::Front}));
}

TEST_CASE("shaking never moves the ball across halves") {
  for (Half x : {Half::Left, Half::Right})
    for (Depth y : {Depth::Front, Depth::Rear})
      for (Half shaken_half : {Half::Left, Half::Right}) {
        const auto r = ls_shake(LSBoxState{x, y}, shaken_half);
        for (const auto& [next, w] : r.state.entries()) REQUIRE(next.x == x);
      }
}

TEST_CASE("shaking twice rattles twice with uniform depth each time") {
  const auto first = ls_shake(LSBoxState{Half::Left, Depth::Front}, Half::Left);
  REQUIRE(first.rattle);
  const auto after_two = chain(first.state, [](const LSBoxState& s) {
    const auto again = ls_shake(s, Half::Left);
    REQUIRE(again.rattle);
    return again.state;
  });
  CHECK(after_two.prob(LSBoxState{Half::Left, Depth::Front}) == Rational(1, 2));
  CHECK(after_two.prob(LSBoxState{Half::Left, Depth::Rear}) == Rational(1, 2));
}

TEST_CASE("tilting reads without disturbing") {
  const LSBoxState state{Half::Left, Depth::Rear};
  const auto read = ls_tilt(state, Half::Left);
  CHECK(read.present);
  CHECK(read.y_read == Depth::Rear);
  CHECK(read.state == state);

  const auto absent = ls_tilt(LSBoxState{Half::Right, Depth::Front}, Half::Left);
  CHECK_FALSE(absent.present);
  CHECK_FALSE(absent.y_read.has_value());
  CHECK(absent.state == LSBoxState{Half::Right, Depth::Front});
}

TEST_CASE("tilt before a shake changes nothing the shake would not do") {
  const LSBoxState state{Half::Left, Depth::Front};
  const auto tilted = ls_tilt(state, Half::Left);
  const auto shake_after_tilt = ls_shake(tilted.state, Half::Left);
  const auto shake_alone = ls_shake(state, Half::Left);
  CHECK(shake_after_tilt.rattle == shake_alone.rattle);
  CHECK(shake_after_tilt.state == shake_alone.state);
}

TEST_CASE("x-ray reads both coordinates and is an identity") {
  for (Half x : {Half::Left, Half::Right})
    for (Depth y : {Depth::Front, Depth::Rear}) {
      const LSBoxState state{x, y};
      const auto [rx, ry] = ls_xray(state);
      CHECK(rx == x);
      CHECK(ry == y);
    }
}
