#include "wermer/discriminant.hpp"

#include <numbers>

namespace wermer {

UniPoly<cplx> interpolate_on_circle(const std::function<cplx(cplx)>& f, int max_degree, double radius) {
  const int m = max_degree + 1;
  std::vector<cplx> values(m);
  for (int k = 0; k < m; ++k) values[k] = f(std::polar(radius, 2.0 * std::numbers::pi * k / m));
  Eigen::VectorXcd coeffs(m);
  double scale = 1.0;
  for (int j = 0; j < m; ++j) {
    cplx acc = 0.0;
    for (int k = 0; k < m; ++k) acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * double(j) * k / m);
    coeffs[j] = acc / (double(m) * scale);
    scale *= radius;
  }
  return UniPoly<cplx>(coeffs);
}

UniPoly<cplx> interpolate_adaptive(const std::function<cplx(cplx)>& f, int max_degree) {
  auto first = trim_relative(interpolate_on_circle(f, max_degree, 1.0), 1e-13);
  const int d = first.degree();
  if (d < 1) return first;
  const double floor = 1e-13 * first.max_abs();
  Eigen::Index low = 0;
  while (low < d && std::abs(first[low]) <= floor) ++low;
  const double ratio = std::abs(first[low]) / std::abs(first.lead());
  const double radius = std::pow(ratio, 1.0 / double(d - low));
  if (!(radius > 0.0) || !std::isfinite(radius) || std::abs(std::log(radius)) < 0.5) return first;
  return trim_relative(interpolate_on_circle(f, max_degree, radius), 1e-13);
}

cplx determinant(Eigen::MatrixXcd m) {
  const Eigen::Index n = m.rows();
  cplx det = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      m.row(k).swap(m.row(piv));
      det = -det;
    }
    det *= m(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const cplx factor = m(i, k) / m(k, k);
      m.row(i).tail(n - k) -= factor * m.row(k).tail(n - k);
    }
  }
  return det;
}

Eigen::MatrixXcd sylvester(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) {
  const Eigen::Index df = f.size() - 1, dg = g.size() - 1, n = df + dg;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index r = 0; r < dg; ++r)
    for (Eigen::Index j = 0; j <= df; ++j) s(r, r + j) = f[df - j];
  for (Eigen::Index r = 0; r < df; ++r)
    for (Eigen::Index j = 0; j <= dg; ++j) s(dg + r, r + j) = g[dg - j];
  return s;
}

UniPoly<cplx> discriminant_in_w(const BiPoly<cplx>& p) {
  const int d = p.deg_w();
  if (d < 2) throw Error(ErrorKind::Degenerate, "discriminant_in_w: deg_w < 2");
  const int bound = (2 * d - 1) * p.deg_z();
  auto at = [&](cplx z) {
    const Eigen::VectorXcd f = p.in_w(z);
    Eigen::VectorXcd g(d);
    for (int j = 1; j <= d; ++j) g[j - 1] = double(j) * f[j];
    return determinant(sylvester(f, g));
  };
  if (bound == 0) return UniPoly<cplx>::constant(at(0.0));
  return interpolate_adaptive(at, bound);
}

}  // namespace wermer
