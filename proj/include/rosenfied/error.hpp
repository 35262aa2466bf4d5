#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rosenfied {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or block dimensions do not conform.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A degree, index, or bijection argument is outside its valid range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegreeMismatch : public Error {
 public:
  using Error::Error;
};

/// The evaluation point is (numerically) a pole of the transfer function.
class SingularAtPoint : public Error {
 public:
  using Error::Error;
};

class IrregularSystem : public Error {
 public:
  using Error::Error;
};

class SingularPencil : public Error {
 public:
  using Error::Error;
};

class StructureMismatch : public Error {
 public:
  using Error::Error;
};

class RelationViolation : public Error {
 public:
  using Error::Error;
};

class StepMismatch : public Error {
 public:
  using Error::Error;
};

class CertificationFailure : public Error {
 public:
  CertificationFailure(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class SpectralMismatch : public Error {
 public:
  using Error::Error;
};

class PoleAtEigenvalue : public Error {
 public:
  using Error::Error;
};

/// A system document does not follow the expected JSON layout. `path` names
/// the offending field, e.g. "A[1][0][2]".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what) : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Random generation hit its redraw limit.
class GiveUp : public Error {
 public:
  using Error::Error;
};

}  // namespace rosenfied
