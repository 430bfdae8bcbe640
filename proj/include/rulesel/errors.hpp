#ifndef RULESEL_ERRORS_HPP
#define RULESEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rulesel {

// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config / input-file problems (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// Upstream service (LLM endpoint) failures (CLI exit code 3).
struct ServiceError : Error {
  using Error::Error;
};

// Numerical failures (CLI exit code 4).
struct NumericalError : Error {
  using Error::Error;
};

struct ZeroVarianceColumn : NumericalError {
  int column;
  explicit ZeroVarianceColumn(int col)
      : NumericalError("score column " + std::to_string(col) +
                       " has zero variance; correlation undefined"),
        column(col) {}
};

struct ZeroNormColumn : NumericalError {
  int column;
  explicit ZeroNormColumn(int col)
      : NumericalError("score column " + std::to_string(col) +
                       " has zero norm; volume undefined"),
        column(col) {}
};

struct RankDeficient : NumericalError {
  int requested;
  int rank;
  RankDeficient(int k, int numerical_rank)
      : NumericalError("cannot draw " + std::to_string(k) +
                       " rules from a kernel of numerical rank " +
                       std::to_string(numerical_rank) +
                       "; lower r or remove duplicate rules"),
        requested(k),
        rank(numerical_rank) {}
};

struct DegenerateProjection : NumericalError {
  DegenerateProjection()
      : NumericalError(
            "all squared projections vanished during DPP phase 2; "
            "kernel is numerically degenerate") {}
};

struct Disconnected : NumericalError {
  Disconnected()
      : NumericalError(
            "comparison graph is disconnected and smoothing is 0; "
            "Bradley-Terry strengths are not identifiable") {}
};

struct ParseError : Error {
  using Error::Error;
};

struct CountMismatch : ParseError {
  int found;
  int expected;
  CountMismatch(int found_, int expected_)
      : ParseError("parsed " + std::to_string(found_) + " rules, expected " +
                   std::to_string(expected_)),
        found(found_),
        expected(expected_) {}
};

}  // namespace rulesel

#endif  // RULESEL_ERRORS_HPP
