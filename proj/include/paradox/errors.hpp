#pragma once

#include <stdexcept>
#include <string>

namespace paradox {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A distribution whose weights are negative, empty, or do not sum to one.
struct InvalidDistribution : Error {
  using Error::Error;
};

// A chain kernel was unable to produce a distribution for a reachable outcome.
struct KernelGap : Error {
  using Error::Error;
};

// Two vectors or a vector/measurement pair do not share a basis.
struct BasisMismatch : Error {
  using Error::Error;
};

// A conditional was requested on an event of probability zero.
struct DegenerateConditioning : Error {
  using Error::Error;
};

// The pile the observation rule designates holds no cards.
struct EmptyPile : Error {
  using Error::Error;
};

// A preparation asked for a value no card in the deck carries.
struct ImpossiblePreparation : Error {
  using Error::Error;
};

// The ad hoc box game defines openings of boxes 1 and 2 only.
struct UnsupportedOpening : Error {
  using Error::Error;
};

// Slit geometry out of the supported regime (a >> lambda, L > 0).
struct GeometryViolation : Error {
  using Error::Error;
};

// The which-path detector sits at slit 1 or slit 2 only.
struct UnsupportedDetectorPosition : Error {
  using Error::Error;
};

// Scenario document is not syntactically or structurally valid JSON input.
struct ParseError : Error {
  using Error::Error;
};

// Scenario parsed but violates an engine precondition.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace paradox
