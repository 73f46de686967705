#pragma once

#include <complex>
#include <cmath>
#include <limits>
#include <type_traits>

#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace wermer {

using cplx = std::complex<double>;

// Extended precision used for the dense coefficient tables of p_n.  The
// constants c_n shrink doubly exponentially, so the roots of p_{n+1} are
// pairs that double precision cannot separate from the coefficients.
using mp_real = boost::multiprecision::cpp_bin_float_50;
using mp_cplx = boost::multiprecision::cpp_complex_50;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<cplx> {
  using real = double;
  static constexpr double epsilon = std::numeric_limits<double>::epsilon();
  static cplx from(cplx v) { return v; }
  static cplx to_cplx(cplx v) { return v; }
  static double abs(cplx v) { return std::abs(v); }
  static double to_double(double v) { return v; }
};

template <>
struct ScalarTraits<mp_cplx> {
  using real = mp_real;
  static inline const double epsilon = 1e-50;
  static mp_cplx from(cplx v) { return mp_cplx(v.real(), v.imag()); }
  static cplx to_cplx(const mp_cplx& v) {
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
  }
  static double abs(const mp_cplx& v) {
    return static_cast<double>(boost::multiprecision::abs(v));
  }
  static double to_double(const mp_real& v) { return static_cast<double>(v); }
};

template <class S>
inline cplx to_cplx(const S& v) { return ScalarTraits<S>::to_cplx(v); }

template <class S>
inline double abs_d(const S& v) { return ScalarTraits<S>::abs(v); }

template <class S>
inline S scalar_from(cplx v) { return ScalarTraits<S>::from(v); }

}  // namespace wermer
