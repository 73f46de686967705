#pragma once

#include <functional>

#include "wermer/bi_poly.hpp"
#include "wermer/root_finding.hpp"

namespace wermer {

/// Recovers the coefficients of a polynomial of degree <= max_degree from
/// its values on the circle |z| = radius (inverse DFT).
UniPoly<cplx> interpolate_on_circle(const std::function<cplx(cplx)>& f, int max_degree, double radius);

/// Same, choosing the radius from a first pass so that the sampled circle
/// sits at the geometric mean of the root moduli.
UniPoly<cplx> interpolate_adaptive(const std::function<cplx(cplx)>& f, int max_degree);

/// Determinant by Gaussian elimination with partial pivoting.
cplx determinant(Eigen::MatrixXcd m);

/// Sylvester matrix of f and g (ascending coefficient vectors).
Eigen::MatrixXcd sylvester(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g);

/// Res_w(p, ∂p/∂w) as a polynomial in z.  Vanishes exactly where p(z, ·)
/// has a repeated root.
UniPoly<cplx> discriminant_in_w(const BiPoly<cplx>& p);

}  // namespace wermer
