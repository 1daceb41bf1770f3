#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>

namespace uqseg {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported NPY content. `field()` names the offending
/// header element ("magic", "version", "descr", "fortran_order", "shape",
/// "header", "payload").
class NpyError : public Error {
public:
  NpyError(std::string field, const std::string &message)
      : Error("npy " + field + ": " + message), field_(std::move(field)) {}
  const std::string &field() const noexcept { return field_; }

private:
  std::string field_;
};

class UnsupportedDtypeError : public NpyError {
public:
  explicit UnsupportedDtypeError(const std::string &descr)
      : NpyError("descr", "unsupported dtype '" + descr + "'") {}
};

class FortranOrderError : public NpyError {
public:
  FortranOrderError()
      : NpyError("fortran_order", "Fortran-ordered arrays are not supported") {}
};

class IoError : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class DegenerateInputError : public Error {
public:
  using Error::Error;
};

class InvalidParameterError : public Error {
public:
  using Error::Error;
};

class SingularMatrixError : public Error {
public:
  using Error::Error;
};

class ConfigurationError : public Error {
public:
  using Error::Error;
};

class ManifestError : public Error {
public:
  using Error::Error;
};

class UndefinedVvcError : public Error {
public:
  UndefinedVvcError()
      : Error("VVC undefined: structure absent in every sample") {}
};

class UndefinedAssdError : public Error {
public:
  explicit UndefinedAssdError(const std::string &which)
      : Error("ASSD undefined: " + which + " surface is empty") {}
};

/// Failure of an external predictor invocation.
class PredictorError : public Error {
public:
  enum class Kind { launch, exit_status, timeout, malformed_output };

  PredictorError(Kind kind, const std::string &message, std::string stderr_text)
      : Error(message + (stderr_text.empty() ? "" : "\nstderr:\n" + stderr_text)),
        kind_(kind), stderr_(std::move(stderr_text)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string &stderr_text() const noexcept { return stderr_; }

private:
  Kind kind_;
  std::string stderr_;
};

/// A Monte Carlo sample failed; carries the sample index and the cause.
class SampleError : public Error {
public:
  SampleError(std::size_t index, const std::string &what, std::exception_ptr cause)
      : Error("sample " + std::to_string(index) + " failed: " + what),
        index_(index), cause_(std::move(cause)) {}

  std::size_t index() const noexcept { return index_; }
  std::exception_ptr cause() const noexcept { return cause_; }

private:
  std::size_t index_;
  std::exception_ptr cause_;
};

} // namespace uqseg
