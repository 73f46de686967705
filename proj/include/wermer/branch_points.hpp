#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wermer/scalar.hpp"

namespace wermer {

/// p/q with q > 0 and gcd(|p|, q) = 1.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return double(num) / double(den); }
  std::int64_t height() const { return std::max<std::int64_t>(num < 0 ? -num : num, den); }
  bool operator==(const Rational&) const = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& s);

struct GaussianRational {
  Rational re, im;
  cplx value() const { return {re.value(), im.value()}; }
  std::int64_t height() const { return std::max(re.height(), im.height()); }
  bool operator==(const GaussianRational&) const = default;
};

/// a_1, a_2, ... (stored 0-based) with a_k ∈ D_k.
struct BranchPointTable {
  std::vector<GaussianRational> points;
  std::size_t size() const { return points.size(); }
  cplx operator[](std::size_t k) const { return points[k].value(); }
};

/// Gaussian rationals ordered by height, then modulus, then argument in
/// [0, 2π); a point that is not yet inside D_k waits for a later slot.
BranchPointTable enumerate_branch_points(std::size_t count);

}  // namespace wermer
