#include "wermer/errors.hpp"

namespace wermer {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPolynomialResidue: return "NonPolynomialResidue";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorKind::BranchPointOnLoop: return "BranchPointOnLoop";
    case ErrorKind::OrderEstimateUnstable: return "OrderEstimateUnstable";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::EmptyExterior: return "EmptyExterior";
    case ErrorKind::ProbeInvalid: return "ProbeInvalid";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::NumericRange: return "NumericRange";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace wermer
