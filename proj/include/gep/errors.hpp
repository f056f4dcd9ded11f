#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gep {

// Coarse failure classes; the CLI maps them onto exit codes.
enum class ErrorClass {
  input,      // malformed files, bad arguments, dimension mismatches
  numerical,  // breakdowns, loss of definiteness, degenerate iterates
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}

  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorClass::input, "dimension mismatch: " + what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorClass::input, "parse error: " + what) {}
};

class NotSquare : public Error {
 public:
  explicit NotSquare(const std::string& what)
      : Error(ErrorClass::input, "matrix is not square: " + what) {}
};

class AsymmetricEntries : public Error {
 public:
  explicit AsymmetricEntries(const std::string& what)
      : Error(ErrorClass::input, "asymmetric entries: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error(ErrorClass::input, "i/o error: " + what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorClass::input, what) {}
};

class InvalidStepsize : public Error {
 public:
  explicit InvalidStepsize(const std::string& what)
      : Error(ErrorClass::input, "invalid stepsize: " + what) {}
};

class StaleFactor : public Error {
 public:
  StaleFactor()
      : Error(ErrorClass::input,
              "factor fingerprint does not match the supplied matrix") {}
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& what)
      : Error(ErrorClass::numerical, "matrix is not positive definite: " + what) {}
};

class ZeroDiagonal : public Error {
 public:
  explicit ZeroDiagonal(std::size_t row)
      : Error(ErrorClass::numerical,
              "non-positive diagonal entry at row " + std::to_string(row)) {}
};

class PcgBreakdown : public Error {
 public:
  explicit PcgBreakdown(const std::string& what)
      : Error(ErrorClass::numerical, "pcg breakdown: " + what) {}
};

class DegenerateDirection : public Error {
 public:
  DegenerateDirection()
      : Error(ErrorClass::numerical,
              "iterate lies (numerically) in the null space of A; reinitialize") {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error(ErrorClass::input, "zero vector has no direction") {}
};

class Breakdown : public Error {
 public:
  explicit Breakdown(const std::string& what)
      : Error(ErrorClass::numerical, "breakdown: " + what) {}
};

class NotNormalized : public Error {
 public:
  explicit NotNormalized(double btb)
      : Error(ErrorClass::input,
              "deflation vector must satisfy u'Bu = 1, got " + std::to_string(btb)) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what)
      : Error(ErrorClass::numerical, what) {}
};

}  // namespace gep
