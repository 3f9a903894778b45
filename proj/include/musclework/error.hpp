#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace musclework {

/// Base of every error thrown by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by stream parsers; carries the 1-based line number when known.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class MalformedRecord : public ParseError {
public:
  MalformedRecord(const std::string& detail, std::size_t line)
      : ParseError("malformed record: " + detail, line) {}
};

class NonMonotonicTimestamp : public ParseError {
public:
  explicit NonMonotonicTimestamp(std::size_t line)
      : ParseError("non-monotonic timestamp", line) {}
};

class MissingJoint : public ParseError {
public:
  MissingJoint(const std::string& joint, std::size_t line)
      : ParseError("missing joint " + joint, line), joint_(joint) {}
  const std::string& joint() const noexcept { return joint_; }

private:
  std::string joint_;
};

/// Precondition failures on numeric operations (too few frames, bad window...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

class TooFewFrames : public InvalidArgument {
public:
  TooFewFrames(std::size_t have, std::size_t need)
      : InvalidArgument("too few frames: have " + std::to_string(have) + ", need " +
                        std::to_string(need)) {}
};

class WindowTooLarge : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class DegeneratePose : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class AngleOutOfRange : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// Model file problems.
class SchemaError : public Error {
public:
  using Error::Error;
};

class UncoveredGroup : public SchemaError {
public:
  using SchemaError::SchemaError;
};

class DuplicateMuscle : public SchemaError {
public:
  using SchemaError::SchemaError;
};

class MissingSegment : public Error {
public:
  using Error::Error;
};

class DofNotSpanned : public Error {
public:
  using Error::Error;
};

/// Numeric failure inside the static optimisation.
class SolverDiverged : public Error {
public:
  using Error::Error;
};

class GenderRequired : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class NegativeDuration : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class DegenerateRange : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class LengthMismatch : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class UnbalancedDesign : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class MissingExercise : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

} // namespace musclework
