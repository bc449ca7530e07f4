#pragma once

#include <stdexcept>
#include <string>

namespace conesv {

enum class ErrorCode {
  InvalidInput,
  RankDeficient,
  NotPSD,
  InvalidGenerator,
  NotPointed,
  NoImprovingDirection,
  NonPointedDegeneracy,
  NumericalFailure,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the numerical rank that was found.
class RankDeficientError : public Error {
 public:
  RankDeficientError(int rank, const std::string& what)
      : Error(ErrorCode::RankDeficient, what), rank_(rank) {}

  int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

// Carries the 1-based line of the offending input.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace conesv
