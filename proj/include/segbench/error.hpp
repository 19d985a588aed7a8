#pragma once

#include <stdexcept>
#include <string>

namespace segbench {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  success = 0,
  argument = 2,
  data = 3,
  internal = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

// Bad arguments to an operation, or an invalid configuration.
class ArgumentError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::argument; }
};

// Malformed file content (bad magic, missing fields, unparsable numbers).
class FormatError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

// Well-formed input the engine does not support (e.g. a NIfTI datatype).
class CapabilityError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

// Input data that is readable but violates a precondition of the analysis
// (unbalanced designs, mismatched grids between prediction and truth, ...).
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

// An external command failed.
class ExecutionError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

// An internal invariant was violated (e.g. fusion coverage).
class InternalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::internal; }
};

}  // namespace segbench
