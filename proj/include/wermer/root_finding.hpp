#pragma once

#include <numeric>
#include <vector>

#include "wermer/bi_poly.hpp"
#include "wermer/errors.hpp"

namespace wermer {

/// Roots with multiplicities.  Representatives of distinct clusters are
/// farther apart than cluster_tol; cluster_tol == 0 means unclustered.
template <class Scalar>
struct RootSet {
  std::vector<Scalar> roots;
  std::vector<int> multiplicities;
  double cluster_tol = 0.0;

  int total() const { return std::accumulate(multiplicities.begin(), multiplicities.end(), 0); }
  std::size_t size() const { return roots.size(); }

  std::vector<cplx> as_cplx() const {
    std::vector<cplx> out;
    for (std::size_t k = 0; k < roots.size(); ++k)
      for (int m = 0; m < multiplicities[k]; ++m) out.push_back(to_cplx(roots[k]));
    return out;
  }
};

namespace detail {

template <class Scalar>
void horner_with_derivative(const typename UniPoly<Scalar>::Vector& c, const Scalar& x, Scalar& p, Scalar& dp) {
  const Eigen::Index n = c.size();
  p = c[n - 1];
  dp = Scalar(0);
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    dp = dp * x + p;
    p = p * x + c[i];
  }
}

/// Companion-matrix eigenvalues in double precision, used as starting points.
std::vector<cplx> companion_roots(const std::vector<cplx>& coeffs);

}  // namespace detail

/// Simultaneous (Aberth–Ehrlich) iteration on the ascending coefficient
/// vector c, started from companion eigenvalues.  Returns deg roots.
template <class Scalar>
std::vector<Scalar> aberth_roots(const typename UniPoly<Scalar>::Vector& c, int max_iter = 600) {
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<Scalar> w;
  if (d < 1) return w;
  std::vector<cplx> cd(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) cd[i] = to_cplx(c[i]);
  const auto start = detail::companion_roots(cd);
  double scale = 1.0;
  for (const auto& s : start) scale = std::max(scale, std::abs(s));
  for (int k = 0; k < d; ++k) {
    cplx s = start[k];
    for (int j = 0; j < k; ++j)
      if (std::abs(s - start[j]) < 1e-12 * scale) s += cplx(1e-9 * scale * std::cos(k + 1.0), 1e-9 * scale * std::sin(k + 1.0));
    w.push_back(scalar_from<Scalar>(s));
  }
  const double tol = 64.0 * ScalarTraits<Scalar>::epsilon * scale;
  std::vector<bool> done(d, false);
  std::vector<int> small(d, 0);
  const double stall = std::max(std::pow(ScalarTraits<Scalar>::epsilon, 0.4), 1e-12);
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (int k = 0; k < d; ++k) {
      if (done[k]) continue;
      Scalar p, dp;
      detail::horner_with_derivative<Scalar>(c, w[k], p, dp);
      if (p == Scalar(0)) { done[k] = true; continue; }
      Scalar sum(0);
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        const Scalar diff = w[k] - w[j];
        if (diff != Scalar(0)) sum += Scalar(1) / diff;
      }
      const Scalar newton = p / dp;
      const Scalar corr = newton / (Scalar(1) - newton * sum);
      w[k] -= corr;
      // Converged, or stalled at the conditioning floor of a near-multiple root.
      const double a = abs_d(corr);
      if (a <= stall * std::max(1.0, abs_d(w[k]))) ++small[k];
      if (a <= tol || small[k] >= 12) done[k] = true;
      else all = false;
    }
    if (all) break;
  }
  return w;
}

/// Groups values within cluster_tol (single linkage) into representatives.
template <class Scalar>
RootSet<Scalar> cluster_roots(const std::vector<Scalar>& raw, double cluster_tol) {
  RootSet<Scalar> out;
  out.cluster_tol = cluster_tol;
  const std::size_t n = raw.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (cluster_tol > 0.0)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (abs_d(Scalar(raw[i] - raw[j])) <= cluster_tol) parent[find(i)] = find(j);
  std::vector<std::size_t> rep_of(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (rep_of[r] == n) {
      rep_of[r] = out.roots.size();
      out.roots.push_back(Scalar(0));
      out.multiplicities.push_back(0);
    }
    out.roots[rep_of[r]] += raw[i];
    out.multiplicities[rep_of[r]] += 1;
  }
  for (std::size_t k = 0; k < out.roots.size(); ++k)
    out.roots[k] /= Scalar(static_cast<double>(out.multiplicities[k]));
  if (cluster_tol > 0.0)
    for (std::size_t a = 0; a < out.roots.size(); ++a)
      for (std::size_t b = a + 1; b < out.roots.size(); ++b)
        if (abs_d(Scalar(out.roots[a] - out.roots[b])) <= 10.0 * cluster_tol)
          throw Error(ErrorKind::ClusterAmbiguity, "two root clusters within 10x cluster tolerance");
  return out;
}

/// Relative backward error |q(x)| / Σ|q_i||x|^i.
template <class Scalar>
double backward_error(const typename UniPoly<Scalar>::Vector& c, const Scalar& x) {
  Scalar acc = c[c.size() - 1];
  double mag = abs_d(c[c.size() - 1]);
  const double ax = abs_d(x);
  for (Eigen::Index i = c.size() - 2; i >= 0; --i) {
    acc = acc * x + c[i];
    mag = mag * ax + abs_d(c[i]);
  }
  return mag > 0.0 ? abs_d(acc) / mag : 0.0;
}

inline constexpr double kDefaultClusterTol = 1e-7;

/// All deg_w roots of p(z0, ·).  Coefficients are normalized to unit max
/// modulus first; a leading coefficient below working precision is
/// Degenerate.
template <class Scalar>
RootSet<Scalar> roots_in_w(const BiPoly<Scalar>& p, const Scalar& z0, double cluster_tol = kDefaultClusterTol) {
  if (p.deg_w() < 1) throw Error(ErrorKind::Degenerate, "roots_in_w: deg_w < 1");
  auto c = p.in_w(z0);
  double m = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) m = std::max(m, abs_d(c[i]));
  if (m == 0.0) throw Error(ErrorKind::Degenerate, "roots_in_w: p(z0, .) vanishes identically");
  const Scalar inv = Scalar(1.0 / m);
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= inv;
  if (abs_d(c[c.size() - 1]) <= 1e3 * ScalarTraits<Scalar>::epsilon)
    throw Error(ErrorKind::Degenerate, "roots_in_w: leading coefficient vanishes at working precision");
  return cluster_roots(aberth_roots<Scalar>(c), cluster_tol);
}

/// Roots of a univariate polynomial with integer multiplicities.
RootSet<cplx> uni_roots(const UniPoly<cplx>& q, double cluster_tol = kDefaultClusterTol);

}  // namespace wermer
