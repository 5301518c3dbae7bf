#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msl {

using Point = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// Bad arguments or violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "dimension_mismatch"; }
};

// A convex body whose data violates the body invariants (h <= 0, asymmetry,
// negative boundary density, ...).
class BodyDefinitionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "body_definition"; }
};

class NotStrictlyConvex : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_strictly_convex"; }
};

class UnsupportedBody : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported_body"; }
};

// A slice or line lies inside the zero set, so the zero count is infinite.
class InfiniteCount : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "infinite_count"; }
};

class CertificateFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "certificate_failure"; }
};

// Internal budget exhausted (e.g. too many degenerate resamples).
class InternalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "internal"; }
};

// A numeric result together with its uncertainty. std_error == 0 marks a
// deterministic value; `tolerance` is an a-priori bound for quadrature results.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double tolerance = 0.0;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace msl
