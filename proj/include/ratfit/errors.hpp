#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ratfit {

// Ordering of a multi-index set lacks an "earlier index + e_j" predecessor;
// only reachable through a construction bug.
class NoPredecessorError : public std::logic_error {
public:
  explicit NoPredecessorError(std::size_t position)
      : std::logic_error("no predecessor for multi-index at position " +
                         std::to_string(position)),
        position(position) {}
  std::size_t position;
};

// Arnoldi pivot collapsed: the point set cannot support the requested
// degree (duplicate points, or too few of them).
class BreakdownError : public std::runtime_error {
public:
  explicit BreakdownError(std::size_t column)
      : std::runtime_error("Arnoldi breakdown at basis column " +
                           std::to_string(column)),
        column(column) {}
  std::size_t column;
};

// R carries a zero diagonal entry, so the evaluation recurrence is undefined.
class DegenerateRError : public std::runtime_error {
public:
  explicit DegenerateRError(std::size_t column)
      : std::runtime_error("zero diagonal in R at column " +
                           std::to_string(column)),
        column(column) {}
  std::size_t column;
};

class MissingResponsesError : public std::invalid_argument {
public:
  MissingResponsesError()
      : std::invalid_argument("point set has no responses") {}
};

// Denominator vanishes exactly at a sample point during refinement.
class PoleAtSampleError : public std::runtime_error {
public:
  explicit PoleAtSampleError(std::size_t sample)
      : std::runtime_error("denominator vanishes at sample " +
                           std::to_string(sample)),
        sample(sample) {}
  std::size_t sample;
};

// Malformed document; the message carries the location.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what) {}
};

}  // namespace ratfit
