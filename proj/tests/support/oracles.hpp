#pragma once

// Reference computations written independently of the library code paths:
// extended-precision theta sums, completed-square b-factors, brute-force
// quadrature and the Heisenberg operators evaluated straight from their
// defining formulas.

#include "nctheta/linalg.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <functional>

namespace nctheta::oracle {

using mp_real = boost::multiprecision::cpp_bin_float_50;
using mp_complex = boost::multiprecision::cpp_complex_50;

/// theta(i t, z) summed in 50-digit arithmetic over |n| <= 60.
inline cplx theta_mp(double t, cplx z) {
  const mp_real pi = boost::math::constants::pi<mp_real>();
  const mp_complex zz(mp_real(z.real()), mp_real(z.imag()));
  mp_complex sum(0);
  for (int n = -60; n <= 60; ++n) {
    const mp_real nn(n);
    const mp_complex e = mp_complex(-pi * mp_real(t) * nn * nn) + mp_complex(0, 2) * pi * nn * zz;
    sum += exp(e);
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

/// exp(-pi m^2/4) sum_n exp(-pi (n + m/2)^2 - pi i (2n + m) r).
inline cplx b_completed_square(double r, std::int64_t m) {
  const double md = static_cast<double>(m);
  cplx sum = 0.0;
  const auto centre = static_cast<std::int64_t>(std::floor(-md / 2.0));
  for (std::int64_t n = centre - 40; n <= centre + 40; ++n) {
    const double a = static_cast<double>(n) + md / 2.0;
    sum += std::exp(cplx(-kPi * a * a, -kPi * (2.0 * static_cast<double>(n) + md) * r));
  }
  return std::exp(-kPi * md * md / 4.0) * sum;
}

using Fn = std::function<cplx(const RVector&, const IVector&)>;

/// (pi_h F)(s,n) = e(w2.s + r.n + (w1.w2 + m.r)/2) F(s + w1, n + m), written out directly.
inline cplx pi_direct(const RVector& w1, const RVector& w2, const IVector& m, const RVector& r, const Fn& F,
                      const RVector& s, const IVector& n) {
  double phase = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) phase += w2(k) * s(k) + 0.5 * w1(k) * w2(k);
  for (Eigen::Index l = 0; l < n.size(); ++l) {
    phase += r(l) * static_cast<double>(n(l)) + 0.5 * static_cast<double>(m(l)) * r(l);
  }
  RVector s2 = s + w1;
  IVector n2 = n + m;
  return std::exp(cplx(0.0, 2.0 * kPi * phase)) * F(s2, n2);
}

/// Midpoint-free trapezoid over [-L, L]^p (p <= 2) times a plain sum over
/// |n|_inf <= N, of F(s,n) conj(G(s,n)).
inline cplx brute_inner(int p, int q, const Fn& F, const Fn& G, double L, double step, int N) {
  const int cnt = static_cast<int>(std::lround(2.0 * L / step)) + 1;
  auto weight = [&](int i) { return (i == 0 || i == cnt - 1) ? 0.5 : 1.0; };
  std::vector<IVector> ns;
  IVector n = IVector::Constant(q, -N);
  if (q == 0) {
    ns.push_back(IVector(0));
  } else {
    while (true) {
      ns.push_back(n);
      int pos = q - 1;
      while (pos >= 0 && n(pos) == N) n(pos--) = -N;
      if (pos < 0) break;
      ++n(pos);
    }
  }
  cplx total = 0.0;
  RVector s(p);
  if (p == 0) {
    for (const auto& nn : ns) total += F(s, nn) * std::conj(G(s, nn));
    return total;
  }
  const int outer = p == 2 ? cnt : 1;
  for (int i = 0; i < outer; ++i) {
    for (int k = 0; k < cnt; ++k) {
      double w = weight(k);
      if (p == 2) {
        s(0) = -L + step * i;
        s(1) = -L + step * k;
        w *= weight(i);
      } else {
        s(0) = -L + step * k;
      }
      for (const auto& nn : ns) total += w * F(s, nn) * std::conj(G(s, nn));
    }
  }
  return total * std::pow(step, p);
}

/// Trapezoid of exp(-s^T M s + v.s) over [-L, L]^p for p <= 2.
inline cplx gaussian_quadrature(const CMatrix& M, const CVector& v, double L, double step) {
  const int p = static_cast<int>(M.rows());
  Fn f = [&](const RVector& s, const IVector&) {
    const CVector sc = s.cast<cplx>();
    return std::exp(-(sc.transpose() * M * sc)(0, 0) + (v.transpose() * sc)(0, 0));
  };
  Fn one = [](const RVector&, const IVector&) { return cplx(1.0); };
  return brute_inner(p, 0, f, one, L, step, 0);
}

}  // namespace nctheta::oracle
