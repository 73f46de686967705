#pragma once

#include <stdexcept>
#include <string>

namespace wermer {

enum class ErrorKind {
  NonPolynomialResidue,
  Degenerate,
  ClusterAmbiguity,
  BranchPointOnLoop,
  OrderEstimateUnstable,
  SearchExhausted,
  EmptyExterior,
  ProbeInvalid,
  SchemaMismatch,
  InvariantViolation,
  NumericRange,
  Usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wermer
