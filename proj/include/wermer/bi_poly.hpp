#pragma once

#include <algorithm>
#include <utility>

#include "wermer/errors.hpp"
#include "wermer/uni_poly.hpp"

namespace wermer {

/// Dense bivariate polynomial Σ c(i,j) z^i w^j.  Rows index powers of z,
/// columns powers of w; degrees are kept tight.
template <class Scalar>
class BiPoly {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BiPoly() : coeffs_(Matrix::Constant(1, 1, Scalar(0))) {}
  explicit BiPoly(Matrix coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0) coeffs_ = Matrix::Constant(1, 1, Scalar(0));
    trim();
  }

  int deg_z() const { return static_cast<int>(coeffs_.rows()) - 1; }
  int deg_w() const { return static_cast<int>(coeffs_.cols()) - 1; }
  const Matrix& coeffs() const { return coeffs_; }
  const Scalar& operator()(Eigen::Index i, Eigen::Index j) const { return coeffs_(i, j); }

  /// Coefficient of w^j as a polynomial in z.
  UniPoly<Scalar> column(Eigen::Index j) const {
    return UniPoly<Scalar>(typename UniPoly<Scalar>::Vector(coeffs_.col(j)));
  }

  /// Coefficients of p(z0, ·) in ascending powers of w.
  typename UniPoly<Scalar>::Vector in_w(const Scalar& z0) const {
    typename UniPoly<Scalar>::Vector out(coeffs_.cols());
    for (Eigen::Index j = 0; j < coeffs_.cols(); ++j) {
      Scalar acc = coeffs_(coeffs_.rows() - 1, j);
      for (Eigen::Index i = coeffs_.rows() - 2; i >= 0; --i) acc = acc * z0 + coeffs_(i, j);
      out[j] = acc;
    }
    return out;
  }

  Scalar eval(const Scalar& z, const Scalar& w) const {
    const auto c = in_w(z);
    Scalar acc = c[c.size() - 1];
    for (Eigen::Index j = c.size() - 2; j >= 0; --j) acc = acc * w + c[j];
    return acc;
  }

  double max_abs() const {
    double m = 0.0;
    for (Eigen::Index j = 0; j < coeffs_.cols(); ++j)
      for (Eigen::Index i = 0; i < coeffs_.rows(); ++i) m = std::max(m, abs_d(coeffs_(i, j)));
    return m;
  }

  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    Matrix c = Matrix::Constant(a.coeffs_.rows() + b.coeffs_.rows() - 1,
                                a.coeffs_.cols() + b.coeffs_.cols() - 1, Scalar(0));
    for (Eigen::Index ja = 0; ja < a.coeffs_.cols(); ++ja)
      for (Eigen::Index jb = 0; jb < b.coeffs_.cols(); ++jb)
        for (Eigen::Index ia = 0; ia < a.coeffs_.rows(); ++ia) {
          const Scalar& x = a.coeffs_(ia, ja);
          if (x == Scalar(0)) continue;
          for (Eigen::Index ib = 0; ib < b.coeffs_.rows(); ++ib) c(ia + ib, ja + jb) += x * b.coeffs_(ib, jb);
        }
    return BiPoly(std::move(c));
  }

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
    Matrix c = Matrix::Constant(std::max(a.coeffs_.rows(), b.coeffs_.rows()),
                                std::max(a.coeffs_.cols(), b.coeffs_.cols()), Scalar(0));
    c.topLeftCorner(a.coeffs_.rows(), a.coeffs_.cols()) += a.coeffs_;
    c.topLeftCorner(b.coeffs_.rows(), b.coeffs_.cols()) += b.coeffs_;
    return BiPoly(std::move(c));
  }

  friend BiPoly operator-(const BiPoly& a) {
    Matrix c = a.coeffs_;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = -c(k);
    return BiPoly(std::move(c));
  }

  friend BiPoly operator*(const Scalar& s, const BiPoly& a) {
    Matrix c = a.coeffs_;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= s;
    return BiPoly(std::move(c));
  }

  /// Multiplies by a polynomial in z only.
  friend BiPoly operator*(const UniPoly<Scalar>& q, const BiPoly& a) {
    Matrix c = Matrix::Constant(a.coeffs_.rows() + q.degree(), a.coeffs_.cols(), Scalar(0));
    for (Eigen::Index j = 0; j < a.coeffs_.cols(); ++j)
      for (Eigen::Index i = 0; i < a.coeffs_.rows(); ++i) {
        const Scalar& x = a.coeffs_(i, j);
        if (x == Scalar(0)) continue;
        for (Eigen::Index k = 0; k <= q.degree(); ++k) c(i + k, j) += x * q[k];
      }
    return BiPoly(std::move(c));
  }

  template <class Other>
  BiPoly<Other> cast() const {
    typename BiPoly<Other>::Matrix c(coeffs_.rows(), coeffs_.cols());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = scalar_from<Other>(to_cplx(coeffs_(k)));
    return BiPoly<Other>(std::move(c));
  }

  /// Zeroes coefficients below rel_tol * max|coeff| and re-tightens degrees.
  BiPoly chopped(double rel_tol) const {
    const double cut = rel_tol * max_abs();
    Matrix c = coeffs_;
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (abs_d(c(k)) <= cut) c(k) = Scalar(0);
    return BiPoly(std::move(c));
  }

 private:
  void trim() {
    Eigen::Index r = coeffs_.rows(), c = coeffs_.cols();
    auto row_zero = [&](Eigen::Index i) {
      for (Eigen::Index j = 0; j < c; ++j)
        if (coeffs_(i, j) != Scalar(0)) return false;
      return true;
    };
    auto col_zero = [&](Eigen::Index j) {
      for (Eigen::Index i = 0; i < r; ++i)
        if (coeffs_(i, j) != Scalar(0)) return false;
      return true;
    };
    while (r > 1 && row_zero(r - 1)) --r;
    while (c > 1 && col_zero(c - 1)) --c;
    if (r != coeffs_.rows() || c != coeffs_.cols()) coeffs_ = Matrix(coeffs_.topLeftCorner(r, c));
  }

  Matrix coeffs_;
};

/// Builds Σ c(i,j) z^i w^j from a double table (tests and stage 1).
inline BiPoly<cplx> make_bipoly(const Eigen::MatrixXcd& table) { return BiPoly<cplx>(table); }

/// Lifts a polynomial in z to a BiPoly of w-degree zero.
template <class Scalar>
BiPoly<Scalar> lift_z(const UniPoly<Scalar>& q) {
  return BiPoly<Scalar>(typename BiPoly<Scalar>::Matrix(q.coeffs()));
}

/// p_c = p̃(z, w - cA) p̃(z, w + cA) where A² = R(z) and p̃ = p / lead_w(p).
/// The product is formed in Q[z,w][A]/(A² - R) and the odd-A part must
/// cancel; residue above tolerance throws NonPolynomialResidue.
template <class Scalar>
BiPoly<Scalar> shift_product(const BiPoly<Scalar>& p, const Scalar& c, const UniPoly<Scalar>& R) {
  using Matrix = typename BiPoly<Scalar>::Matrix;
  const int d = p.deg_w();
  const auto lead = p.column(d);
  if (lead.degree() != 0 || lead[0] == Scalar(0))
    throw Error(ErrorKind::Degenerate, "shift_product: leading w-coefficient is not a nonzero constant");
  const Scalar inv_lead = Scalar(1) / lead[0];

  // R^k, k = 0..d/2 and c^i, i = 0..d.
  std::vector<UniPoly<Scalar>> r_pow{UniPoly<Scalar>::constant(Scalar(1))};
  for (int k = 1; k <= d / 2; ++k) r_pow.push_back(r_pow.back() * R);
  std::vector<Scalar> c_pow{Scalar(1)};
  for (int i = 1; i <= d; ++i) c_pow.push_back(c_pow.back() * c);

  // p̃(w + cA) = E + O·A.
  const int rows_even = p.deg_z() + (d / 2) * R.degree() + 1;
  Matrix even = Matrix::Constant(rows_even, d + 1, Scalar(0));
  Matrix odd = Matrix::Constant(rows_even, d + 1, Scalar(0));
  std::vector<double> binom(d + 1, 1.0);
  for (int k = 0; k <= d; ++k) {
    const auto q = inv_lead * p.column(k);
    if (q.is_zero()) continue;
    double b = 1.0;  // C(k, i)
    for (int i = 0; i <= k; ++i) {
      const auto term = (Scalar(b) * c_pow[i]) * (q * r_pow[i / 2]);
      Matrix& dst = (i % 2 == 0) ? even : odd;
      for (int r = 0; r <= term.degree(); ++r) dst(r, k - i) += term[r];
      b = b * static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
  }
  const BiPoly<Scalar> E(std::move(even));
  const BiPoly<Scalar> O(std::move(odd));

  // (E - O·A)(E + O·A) = E² - O²R with odd part E·O - O·E.
  const BiPoly<Scalar> prod_even = E * E + Scalar(-1) * (R * (O * O));
  const BiPoly<Scalar> residue = E * O + -(O * E);
  const double scale = std::max(prod_even.max_abs(), 1e-300);
  const double tol = 1e3 * ScalarTraits<Scalar>::epsilon * std::max(1.0, E.max_abs() * O.max_abs() / scale) * scale;
  if (residue.max_abs() > tol)
    throw Error(ErrorKind::NonPolynomialResidue, "odd radical part did not cancel");
  return prod_even;
}

}  // namespace wermer
