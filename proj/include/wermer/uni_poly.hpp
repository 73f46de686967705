#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "wermer/scalar.hpp"

namespace wermer {

/// Univariate polynomial with ascending coefficients c[0] + c[1] x + ...
template <class Scalar>
class UniPoly {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  UniPoly() : coeffs_(Vector::Constant(1, Scalar(0))) {}
  explicit UniPoly(Vector coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0) coeffs_ = Vector::Constant(1, Scalar(0));
    trim();
  }

  static UniPoly constant(const Scalar& v) { return UniPoly(Vector::Constant(1, v)); }

  /// Π (x - r_k)^{m_k}, expanded in the polynomial's own scalar type.
  static UniPoly from_roots(const std::vector<std::pair<cplx, int>>& roots) {
    Vector c = Vector::Constant(1, Scalar(1));
    for (const auto& [r, m] : roots) {
      const Scalar root = scalar_from<Scalar>(r);
      for (int rep = 0; rep < m; ++rep) {
        Vector next = Vector::Constant(c.size() + 1, Scalar(0));
        for (Eigen::Index i = 0; i < c.size(); ++i) {
          next[i + 1] += c[i];
          next[i] -= root * c[i];
        }
        c = std::move(next);
      }
    }
    return UniPoly(std::move(c));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Vector& coeffs() const { return coeffs_; }
  const Scalar& operator[](Eigen::Index i) const { return coeffs_[i]; }
  const Scalar& lead() const { return coeffs_[coeffs_.size() - 1]; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Scalar(0); }

  Scalar operator()(const Scalar& x) const {
    Scalar acc = coeffs_[coeffs_.size() - 1];
    for (Eigen::Index i = coeffs_.size() - 2; i >= 0; --i) acc = acc * x + coeffs_[i];
    return acc;
  }

  UniPoly derivative() const {
    if (degree() == 0) return UniPoly();
    Vector d(coeffs_.size() - 1);
    for (Eigen::Index i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * Scalar(static_cast<double>(i));
    return UniPoly(std::move(d));
  }

  double max_abs() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i) m = std::max(m, abs_d(coeffs_[i]));
    return m;
  }

  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    Vector c = Vector::Constant(a.coeffs_.size() + b.coeffs_.size() - 1, Scalar(0));
    for (Eigen::Index i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i] == Scalar(0)) continue;
      for (Eigen::Index j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return UniPoly(std::move(c));
  }

  friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    Vector c = Vector::Constant(std::max(a.coeffs_.size(), b.coeffs_.size()), Scalar(0));
    c.head(a.coeffs_.size()) += a.coeffs_;
    c.head(b.coeffs_.size()) += b.coeffs_;
    return UniPoly(std::move(c));
  }

  friend UniPoly operator*(const Scalar& s, const UniPoly& a) {
    Vector c = a.coeffs_;
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= s;
    return UniPoly(std::move(c));
  }

  template <class Other>
  UniPoly<Other> cast() const {
    typename UniPoly<Other>::Vector c(coeffs_.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = scalar_from<Other>(to_cplx(coeffs_[i]));
    return UniPoly<Other>(std::move(c));
  }

 private:
  void trim() {
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_[n - 1] == Scalar(0)) --n;
    if (n != coeffs_.size()) coeffs_.conservativeResize(n);
  }

  Vector coeffs_;
};

/// Removes trailing coefficients below rel_tol * max|coeff|.
template <class Scalar>
UniPoly<Scalar> trim_relative(const UniPoly<Scalar>& p, double rel_tol) {
  const double scale = p.max_abs();
  Eigen::Index n = p.coeffs().size();
  while (n > 1 && abs_d(p.coeffs()[n - 1]) <= rel_tol * scale) --n;
  return UniPoly<Scalar>(p.coeffs().head(n));
}

}  // namespace wermer
