#pragma once

#include <stdexcept>
#include <string>

namespace solon {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// s exceeds the tolerable bound (P - r_c) / 2, or a parameter is out of range.
struct InfeasibleConfig : Error {
  using Error::Error;
};

/// The redundancy ratio 2s + r_c does not divide the worker count P.
struct NotDivisible : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// More mismatching nodes were located than the configured adversary bound s.
struct TooManyAdversaries : Error {
  TooManyAdversaries(const std::string& msg, int group_index)
      : Error(msg), group(group_index) {}
  int group;
};

/// Fewer than r_c honest nodes available for block recovery.
struct InsufficientHonest : Error {
  InsufficientHonest(const std::string& msg, int group_index)
      : Error(msg), group(group_index) {}
  int group;
};

/// A square Vandermonde restriction was singular (distinct weights rule this
/// out; guarded regardless).
struct SingularSubmatrix : Error {
  SingularSubmatrix(const std::string& msg, int group_index)
      : Error(msg), group(group_index) {}
  int group;
};

/// A linear solve left a residual beyond tolerance, or a located set could not
/// be reconciled with the received data.
struct NumericalFailure : Error {
  explicit NumericalFailure(const std::string& msg, int group_index = -1)
      : Error(msg), group(group_index) {}
  int group;
};

/// An attack specification lists more adversaries than the config tolerates.
struct TooManyInSpec : Error {
  using Error::Error;
};

struct NegativeInput : Error {
  using Error::Error;
};

struct DigitOverflow : Error {
  using Error::Error;
};

/// Config-file parse failure; `field` names the offending key when known.
struct ParseError : Error {
  explicit ParseError(const std::string& msg, std::string field_name = {})
      : Error(msg), field(std::move(field_name)) {}
  std::string field;
};

/// Brute-force oracle: no assumed-corruption subset explains the received data.
struct NoConsistentSubset : Error {
  using Error::Error;
};

/// Brute-force oracle: two subsets explain the data with different gradients
/// (possible only below the r = 2s + r_c uniqueness regime).
struct AmbiguousRecovery : Error {
  using Error::Error;
};

}  // namespace solon
