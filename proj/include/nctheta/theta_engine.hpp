#pragma once

// Classical Jacobi theta series, Gaussian integrals, the Hermitian form H,
// Rieffel inner products <f, pi_h g> (closed form and quadrature), and the
// quantum theta element built from them.

#include "nctheta/heisenberg.hpp"

namespace nctheta {

inline constexpr double kDefaultTailEps = 1e-15;

struct ThetaSeriesParams {
  cplx tau{0.0, 1.0};
  cplx z{};
  double tail_eps = kDefaultTailEps;
};

/// Smallest N >= 0 with 2 * sum_{n>N} exp(-pi Im(tau) n^2 + 2 pi |Im z| n) < eps.
int theta_truncation(const ThetaSeriesParams& params);

/// theta(tau, z) = sum_n exp(pi i tau n^2 + 2 pi i n z), summed over |n| <= N.
cplx classical_theta(const ThetaSeriesParams& params);

/// b_{r,m} = exp(-(pi/2) m^2 - pi i m r) theta(i, -r + i m/2).
cplx b_factor(double r, std::int64_t m, double tail_eps = kDefaultTailEps);

/// exp((pi/4) m^2) b_{r,m}: O(1) in m and zero exactly at the theta zeros.
cplx b_factor_normalized(double r, std::int64_t m, double tail_eps = kDefaultTailEps);

/// Product of b_{r_j, m_j} over the Z^q x T^q blocks of h.
cplx lattice_factor(const LatticePoint& h, double tail_eps = kDefaultTailEps);

/// Omega with Im Omega > 0 and the cached inverse of Im Omega.
class HermitianFormContext {
 public:
  explicit HermitianFormContext(CMatrix omega);

  const CMatrix& omega() const noexcept { return omega_; }
  const RMatrix& im_omega_inv() const noexcept { return im_inv_; }
  int p() const noexcept { return static_cast<int>(omega_.rows()); }

  /// Complex coordinate Omega w1 + w2 of a lattice point.
  CVector complex_coordinate(const LatticePoint& h) const;

 private:
  CMatrix omega_;
  RMatrix im_inv_;
};

/// H(g,h) = (Omega g.w1 + g.w2)^T (Im Omega)^{-1} conj(Omega h.w1 + h.w2).
cplx hermitian_form(const HermitianFormContext& ctx, const LatticePoint& g, const LatticePoint& h);

/// Integral over R^p of exp(-s^T M s + v.s) for complex symmetric M with
/// Re M > 0. The square root of det M follows the eigenvalues of M, each of
/// which lies in the right half plane.
cplx gaussian_integral(const CMatrix& m, const CVector& v);

/// sum_{n in Z} exp(-pi (n - c)^2 + 2 pi i nu n), truncated relative to the
/// largest term.
cplx discrete_gaussian_sum(double c, cplx nu, double tail_eps = kDefaultTailEps);

/// <f, g> = sum_n int f(s,n) conj(g(s,n)) ds for two Gaussian vectors.
cplx gaussian_inner(const GaussianVector& f, const GaussianVector& g, double tail_eps = kDefaultTailEps);

/// <f, pi_h g> in closed form.
cplx inner_product_closed(const GaussianVector& f, const GaussianVector& g, const LatticePoint& h,
                          double tail_eps = kDefaultTailEps);

/// Trapezoid rule over the s-grid of f times the finite lattice sum, with
/// pi_h g evaluated pointwise from its defining formula.
cplx inner_product_quadrature(const SampledVector& f, const ModuleFunction& g, const LatticePoint& h);

/// Both vectors sampled on the same grid; h.w1 must be a whole number of
/// grid steps. Values shifted off the grid count as zero.
cplx inner_product_quadrature(const SampledVector& f, const SampledVector& g, const LatticePoint& h);

/// sqrt(2^p det Im Omega).
double theta_normalization(const CMatrix& omega);

/// coeffs(k) = sqrt(2^p det Im Omega) <f, pi_{Phi k} f> over |k|_inf <= radius.
/// f must be the standard theta vector (ell = 0, n0 = 0, mu = 0, c0 = 1).
QuantumElement quantum_theta(const EmbeddingMap& emb, const GaussianVector& f, std::int64_t radius,
                             double tail_eps = kDefaultTailEps);

/// b~_h exp(-(pi/2) H(h,h)): the coefficient of the quantum theta at h.
cplx theta_coefficient_formula(const HermitianFormContext& ctx, const LatticePoint& h,
                               double tail_eps = kDefaultTailEps);

/// Upper bound on sum_{|k|_inf > radius} |coeffs(k)| from the Gaussian majorant
/// |coeffs(k)| <= theta(i,0)^q exp(-k^T P k).
double truncation_tail_bound(const EmbeddingMap& emb, const CMatrix& omega, std::int64_t radius);

struct DecayFit {
  double slope = 0.0;  ///< d log|c| / d |k|^2
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (|k|_2^2, log|coeffs(k)|).
DecayFit decay_fit(const QuantumElement& x);

}  // namespace nctheta
