#ifndef DUALSTREAM_ERROR_HPP
#define DUALSTREAM_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dualstream {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  MalformedField,
  WrongFieldCount,
  NonFinite,
  NegativeSpeed,
  PitchOutOfRange,
  MissingHeader,
  BadMetadata,
};

inline const char* to_string(ParseErrorKind kind) {
  switch (kind) {
  case ParseErrorKind::MalformedField: return "MalformedField";
  case ParseErrorKind::WrongFieldCount: return "WrongFieldCount";
  case ParseErrorKind::NonFinite: return "NonFinite";
  case ParseErrorKind::NegativeSpeed: return "NegativeSpeed";
  case ParseErrorKind::PitchOutOfRange: return "PitchOutOfRange";
  case ParseErrorKind::MissingHeader: return "MissingHeader";
  case ParseErrorKind::BadMetadata: return "BadMetadata";
  }
  return "Unknown";
}

/// Record-level telemetry or metadata error. Carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + to_string(kind) + ": " + detail),
        kind_(kind),
        line_(line) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

private:
  ParseErrorKind kind_;
  std::size_t line_;
};

class InsufficientMissions : public Error {
public:
  using Error::Error;
};

class SeriesTooShort : public Error {
public:
  using Error::Error;
};

class InvalidParams : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class CorpusError : public Error {
public:
  using Error::Error;
};

enum class ModelFormatErrorKind { BadMagic, UnsupportedVersion, ChecksumMismatch, Io };

class ModelFormatError : public Error {
public:
  ModelFormatError(ModelFormatErrorKind kind, const std::string& detail)
      : Error(detail), kind_(kind) {}
  ModelFormatErrorKind kind() const noexcept { return kind_; }

private:
  ModelFormatErrorKind kind_;
};

class CalibrationError : public Error {
public:
  using Error::Error;
};

class ContractError : public Error {
public:
  using Error::Error;
};

class DegenerateInput : public Error {
public:
  using Error::Error;
};

class SmallSample : public Error {
public:
  using Error::Error;
};

class InsufficientData : public Error {
public:
  using Error::Error;
};

} // namespace dualstream

#endif // DUALSTREAM_ERROR_HPP
