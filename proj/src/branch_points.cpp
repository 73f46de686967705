#include "wermer/branch_points.hpp"

#include <deque>
#include <numbers>
#include <numeric>

#include "wermer/errors.hpp"

namespace wermer {

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorKind::NumericRange, "rational with zero denominator");
  if (den < 0) num = -num, den = -den;
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return {num / g, den / g};
}

std::string to_string(const Rational& r) {
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

Rational parse_rational(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return make_rational(std::stoll(s), 1);
    return make_rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::SchemaMismatch, "bad rational '" + s + "'");
  }
}

namespace {

using i128 = __int128;

// |a|^2 as an exact fraction.
std::pair<i128, i128> modulus2(const GaussianRational& a) {
  const i128 pr = a.re.num, qr = a.re.den, pi = a.im.num, qi = a.im.den;
  return {pr * pr * qi * qi + pi * pi * qr * qr, qr * qr * qi * qi};
}

bool modulus_less(const GaussianRational& a, const GaussianRational& b) {
  const auto [na, da] = modulus2(a);
  const auto [nb, db] = modulus2(b);
  return na * db < nb * da;
}

bool modulus_equal(const GaussianRational& a, const GaussianRational& b) {
  const auto [na, da] = modulus2(a);
  const auto [nb, db] = modulus2(b);
  return na * db == nb * da;
}

double arg_positive(const GaussianRational& a) {
  double t = std::atan2(a.im.value(), a.re.value());
  if (t < 0) t += 2.0 * std::numbers::pi;
  return t;
}

std::vector<Rational> rationals_of_height(std::int64_t h) {
  std::vector<Rational> out;
  for (std::int64_t q = 1; q <= h; ++q)
    for (std::int64_t p = -h; p <= h; ++p) {
      if (std::gcd(p < 0 ? -p : p, q) != 1) continue;
      const Rational r{p, q};
      if (r.height() <= h) out.push_back(r);
    }
  return out;
}

}  // namespace

BranchPointTable enumerate_branch_points(std::size_t count) {
  BranchPointTable table;
  std::deque<GaussianRational> waiting;
  for (std::int64_t h = 1; table.size() < count; ++h) {
    std::vector<GaussianRational> shell;
    const auto rs = rationals_of_height(h);
    for (const auto& x : rs)
      for (const auto& y : rs)
        if (std::max(x.height(), y.height()) == h) shell.push_back({x, y});
    std::sort(shell.begin(), shell.end(), [](const auto& a, const auto& b) {
      if (!modulus_equal(a, b)) return modulus_less(a, b);
      return arg_positive(a) < arg_positive(b);
    });
    for (const auto& g : shell) waiting.push_back(g);
    // Slot k (1-based) needs |a_k| < k; take the first waiting point that fits.
    bool placed = true;
    while (placed && table.size() < count) {
      placed = false;
      const double k = double(table.size() + 1);
      for (auto it = waiting.begin(); it != waiting.end(); ++it)
        if (std::abs(it->value()) < k) {
          table.points.push_back(*it);
          waiting.erase(it);
          placed = true;
          break;
        }
    }
  }
  return table;
}

}  // namespace wermer
