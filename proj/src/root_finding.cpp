#include "wermer/root_finding.hpp"

#include <Eigen/Eigenvalues>

namespace wermer {

namespace detail {

std::vector<cplx> companion_roots(const std::vector<cplx>& coeffs) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d == 1) return {-coeffs[0] / coeffs[1]};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -coeffs[i] / coeffs[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
  std::vector<cplx> out(d);
  for (int i = 0; i < d; ++i) out[i] = solver.eigenvalues()[i];
  return out;
}

}  // namespace detail

RootSet<cplx> uni_roots(const UniPoly<cplx>& q, double cluster_tol) {
  if (q.degree() < 1) throw Error(ErrorKind::Degenerate, "uni_roots: degree < 1");
  auto c = q.coeffs();
  c /= q.max_abs();
  return cluster_roots(aberth_roots<cplx>(c), cluster_tol);
}

}  // namespace wermer
