#pragma once

#include <complex>
#include <type_traits>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace qsum {

using cplx = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

// Truncated Taylor polynomial in z: coefficient k of z^k.
template <class S>
using ZPoly = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using ZPolyc = ZPoly<cplx>;

// Zero-filled storage; avoids constructing from Eigen nullary expressions, which
// boost::multiprecision's converting constructors reject.
template <class M>
M zeros(Eigen::Index rows, Eigen::Index cols = 1) {
  M m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = typename M::Scalar(0);
  return m;
}

struct Truncation {
  int mt = 0;
  int mz = 0;
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

template <class S>
struct scalar_traits {
  using real = S;
};
template <class R>
struct scalar_traits<std::complex<R>> {
  using real = R;
};
template <class S>
using real_t = typename scalar_traits<S>::real;

template <class S>
double magnitude(const S& x) {
  if constexpr (std::is_same_v<S, Rational>) {
    return static_cast<double>(boost::multiprecision::abs(x));
  } else {
    using std::abs;
    return static_cast<double>(abs(x));
  }
}

template <class S>
bool is_exact_zero(const S& x) {
  return x == S(0);
}

}  // namespace qsum
