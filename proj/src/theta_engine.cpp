#include "nctheta/theta_engine.hpp"

#include "nctheta/errors.hpp"

#include <cmath>
#include <limits>

namespace nctheta {

namespace {

constexpr int kMaxTerms = 1'000'000;

// Smallest N with  2 * sum_{n>N} exp(-a n^2 + b n) < eps, bounded by the
// geometric majorant t(N+1) / (1 - rho), rho = t(N+2)/t(N+1).
int gaussian_tail_cutoff(double a, double b, double eps) {
  for (int n = 0; n < kMaxTerms; ++n) {
    const double next = n + 1.0;
    const double log_rho = -a * (2.0 * next + 1.0) + b;
    if (log_rho >= 0.0) continue;
    const double log_t = -a * next * next + b * next;
    const double bound = 2.0 * std::exp(log_t) / (1.0 - std::exp(log_rho));
    if (bound < eps) return n;
  }
  throw Error(ErrorCode::InvalidArgument, "theta series does not reach tail bound");
}

double theta_i0_upper() {
  static const double v = std::abs(classical_theta({cplx(0.0, 1.0), cplx(0.0, 0.0), 1e-17})) * (1.0 + 1e-12);
  return v;
}

}  // namespace

int theta_truncation(const ThetaSeriesParams& params) {
  if (!(params.tau.imag() > 0.0)) throw Error(ErrorCode::BadTau, "Im tau must be positive");
  if (!(params.tail_eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail_eps must be positive");
  return gaussian_tail_cutoff(kPi * params.tau.imag(), 2.0 * kPi * std::abs(params.z.imag()), params.tail_eps);
}

cplx classical_theta(const ThetaSeriesParams& params) {
  const int n_max = theta_truncation(params);
  cplx sum{};
  // Smallest terms first.
  for (int n = n_max; n >= 1; --n) {
    const double nd = n;
    sum += std::exp(kI * kPi * params.tau * nd * nd + 2.0 * kPi * kI * nd * params.z);
    sum += std::exp(kI * kPi * params.tau * nd * nd - 2.0 * kPi * kI * nd * params.z);
  }
  return sum + 1.0;
}

cplx b_factor(double r, std::int64_t m, double tail_eps) {
  const double md = static_cast<double>(m);
  const cplx theta = classical_theta({kI, cplx(-r, md / 2.0), tail_eps});
  return std::exp(-0.5 * kPi * md * md - kI * kPi * md * r) * theta;
}

cplx b_factor_normalized(double r, std::int64_t m, double tail_eps) {
  const double md = static_cast<double>(m);
  const cplx theta = classical_theta({kI, cplx(-r, md / 2.0), tail_eps});
  return std::exp(-0.25 * kPi * md * md - kI * kPi * md * r) * theta;
}

cplx lattice_factor(const LatticePoint& h, double tail_eps) {
  cplx out = 1.0;
  for (int j = 0; j < h.q(); ++j) out *= b_factor(h.r(j), h.m(j), tail_eps);
  return out;
}

HermitianFormContext::HermitianFormContext(CMatrix omega) : omega_(std::move(omega)) {
  if (omega_.rows() != omega_.cols()) throw Error(ErrorCode::DimensionMismatch, "Omega must be square");
  if (max_abs(omega_ - omega_.transpose()) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "Omega is not symmetric");
  }
  const RMatrix im = 0.5 * (omega_.imag() + omega_.imag().transpose());
  if (im.size() > 0) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(im);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, "Im Omega is not positive definite");
    }
  }
  im_inv_ = im.size() > 0 ? RMatrix(im.inverse()) : RMatrix(0, 0);
  if (im.size() > 0 && max_abs(im_inv_ * im - RMatrix::Identity(im.rows(), im.cols())) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "Im Omega too ill-conditioned");
  }
}

CVector HermitianFormContext::complex_coordinate(const LatticePoint& h) const {
  if (h.p() != p()) throw Error(ErrorCode::DimensionMismatch, "lattice point has wrong p");
  return omega_ * h.w1.cast<cplx>() + h.w2.cast<cplx>();
}

cplx hermitian_form(const HermitianFormContext& ctx, const LatticePoint& g, const LatticePoint& h) {
  const CVector gu = ctx.complex_coordinate(g);
  const CVector hu = ctx.complex_coordinate(h);
  return (gu.transpose() * ctx.im_omega_inv().cast<cplx>() * hu.conjugate())(0, 0);
}

cplx gaussian_integral(const CMatrix& m, const CVector& v) {
  const Eigen::Index p = m.rows();
  if (m.cols() != p || v.size() != p) throw Error(ErrorCode::DimensionMismatch, "M must be p x p, v length p");
  if (p == 0) return 1.0;
  const RMatrix re = 0.5 * (m.real() + m.real().transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> res(re);
  if (res.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::DivergentIntegral, "Re M is not positive definite");
  }
  Eigen::ComplexEigenSolver<CMatrix> es(m);
  cplx root_det = 1.0;
  for (Eigen::Index i = 0; i < p; ++i) root_det *= std::sqrt(es.eigenvalues()(i));
  const CVector minv_v = m.fullPivLu().solve(v);
  const cplx quad = (v.transpose() * minv_v)(0, 0);
  return std::pow(kPi, 0.5 * static_cast<double>(p)) / root_det * std::exp(0.25 * quad);
}

cplx discrete_gaussian_sum(double c, cplx nu, double tail_eps) {
  // |term| = exp(-pi (n - n*)^2) * peak with n* = c - Im nu.
  const double n_star = c - nu.imag();
  const auto center = static_cast<std::int64_t>(std::llround(n_star));
  // Offsets j satisfy |n - n*| >= |j| - 1/2.
  const int n_max = gaussian_tail_cutoff(kPi, kPi, tail_eps) + 1;
  cplx sum{};
  for (int j = n_max; j >= 1; --j) {
    for (int sgn : {1, -1}) {
      const double n = static_cast<double>(center + sgn * j);
      sum += std::exp(-kPi * (n - c) * (n - c) + 2.0 * kPi * kI * nu * n);
    }
  }
  const double n0 = static_cast<double>(center);
  return sum + std::exp(-kPi * (n0 - c) * (n0 - c) + 2.0 * kPi * kI * nu * n0);
}

cplx gaussian_inner(const GaussianVector& f, const GaussianVector& g, double tail_eps) {
  if (f.p() != g.p() || f.q() != g.q()) throw Error(ErrorCode::DimensionMismatch, "vectors differ in (p,q)");
  // s-integral of exp(-s^T M s + v.s).
  const CMatrix m = -kI * kPi * f.omega + kI * kPi * g.omega.conjugate();
  const CVector v = 2.0 * kPi * kI * (f.ell - g.ell.conjugate());
  cplx out = f.c0 * std::conj(g.c0) * gaussian_integral(m, v);
  // Each Z factor: exp(-(pi/2)[(n-a)^2 + (n-b)^2]) = exp(-(pi/4)(a-b)^2) exp(-pi (n - (a+b)/2)^2).
  for (int l = 0; l < f.q(); ++l) {
    const double a = static_cast<double>(f.n0(l));
    const double b = static_cast<double>(g.n0(l));
    const cplx nu = f.mu(l) - std::conj(g.mu(l));
    out *= std::exp(-0.25 * kPi * (a - b) * (a - b)) * discrete_gaussian_sum(0.5 * (a + b), nu, tail_eps);
  }
  return out;
}

cplx inner_product_closed(const GaussianVector& f, const GaussianVector& g, const LatticePoint& h,
                          double tail_eps) {
  return gaussian_inner(f, apply_pi(h, g), tail_eps);
}

cplx inner_product_quadrature(const SampledVector& f, const ModuleFunction& g, const LatticePoint& h) {
  if (h.p() != f.p() || h.q() != f.q()) throw Error(ErrorCode::DimensionMismatch, "grid and point differ in (p,q)");
  const ModuleFunction pig = pi_pointwise(h, g);
  const int last = f.points_per_s_axis() - 1;
  const double cell = std::pow(f.step(), f.p());
  cplx sum{};
  RVector s;
  IVector n;
  const auto& vals = f.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == cplx{}) continue;
    f.coordinates(i, s, n);
    double w = cell;
    for (int k = 0; k < f.p(); ++k) {
      const long step_idx = std::lround((s(k) + f.grid_radius()) / f.step());
      if (step_idx == 0 || step_idx == last) w *= 0.5;
    }
    sum += w * vals[i] * std::conj(pig(s, n));
  }
  return sum;
}

cplx inner_product_quadrature(const SampledVector& f, const SampledVector& g, const LatticePoint& h) {
  if (!f.same_grid(g)) throw Error(ErrorCode::GridMismatch, "sampled vectors live on different grids");
  if (h.p() != f.p() || h.q() != f.q()) throw Error(ErrorCode::DimensionMismatch, "grid and point differ in (p,q)");
  std::vector<int> shift(f.p());
  for (int k = 0; k < f.p(); ++k) {
    const double steps = h.w1(k) / f.step();
    if (std::abs(steps - std::round(steps)) > 1e-9) {
      throw Error(ErrorCode::GridMismatch, "shift w1 is not a whole number of grid steps");
    }
    shift[k] = static_cast<int>(std::lround(steps));
  }
  const int last = f.points_per_s_axis() - 1;
  const double cell = std::pow(f.step(), f.p());
  const RVector md = h.m.cast<double>();
  const double const_phase = kPi * (h.w1.dot(h.w2) + md.dot(h.r));
  cplx sum{};
  RVector s;
  IVector n;
  std::vector<int> target(f.p());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coordinates(i, s, n);
    double w = cell;
    for (int k = 0; k < f.p(); ++k) {
      const int step_idx = static_cast<int>(std::lround((s(k) + f.grid_radius()) / f.step()));
      if (step_idx == 0 || step_idx == last) w *= 0.5;
      target[k] = step_idx + shift[k];
    }
    const std::size_t j = g.locate(target, n + h.m);
    if (j == SampledVector::npos) continue;
    const double phase = 2.0 * kPi * (h.w2.dot(s) + h.r.dot(n.cast<double>())) + const_phase;
    sum += w * f.values()[i] * std::conj(std::polar(1.0, phase) * g.values()[j]);
  }
  return sum;
}

double theta_normalization(const CMatrix& omega) {
  const Eigen::Index p = omega.rows();
  if (p == 0) return 1.0;
  const RMatrix im = 0.5 * (omega.imag() + omega.imag().transpose());
  return std::sqrt(std::pow(2.0, static_cast<double>(p)) * im.determinant());
}

QuantumElement quantum_theta(const EmbeddingMap& emb, const GaussianVector& f, std::int64_t radius,
                             double tail_eps) {
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "truncation radius must be >= 1");
  if (f.p() != emb.p() || f.q() != emb.q()) throw Error(ErrorCode::DimensionMismatch, "vector/embedding (p,q) differ");
  f.validate();
  if (max_abs(f.ell) != 0.0 || (f.n0.size() > 0 && f.n0.cwiseAbs().maxCoeff() != 0) || max_abs(f.mu) != 0.0 ||
      f.c0 != cplx(1.0, 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantum theta needs the standard theta vector");
  }
  const double norm = theta_normalization(f.omega);
  QuantumElement out(emb, radius);
  for (const auto& k : index_ball(emb.d(), radius)) {
    out.set(k, norm * inner_product_closed(f, f, lattice_point(emb, k), tail_eps));
  }
  return out;
}

cplx theta_coefficient_formula(const HermitianFormContext& ctx, const LatticePoint& h, double tail_eps) {
  return lattice_factor(h, tail_eps) * std::exp(-0.5 * kPi * hermitian_form(ctx, h, h).real());
}

double truncation_tail_bound(const EmbeddingMap& emb, const CMatrix& omega, std::int64_t radius) {
  const int p = emb.p();
  const int q = emb.q();
  const int d = emb.d();
  RMatrix form = RMatrix::Zero(d, d);
  if (p > 0) {
    const HermitianFormContext ctx(omega);
    CMatrix lin(p, 2 * p);
    lin << omega, CMatrix::Identity(p, p);
    // H(w,w) = x^T K x for x = (w1, w2).
    const RMatrix k = (lin.transpose() * ctx.im_omega_inv().cast<cplx>() * lin.conjugate()).real();
    const RMatrix phi_w = emb.phi().topRows(2 * p);
    form += 0.5 * kPi * phi_w.transpose() * (0.5 * (k + k.transpose())) * phi_w;
  }
  if (q > 0) {
    const RMatrix phi_m = emb.phi().middleRows(2 * p, q);
    form += 0.25 * kPi * phi_m.transpose() * phi_m;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (form + form.transpose()));
  const double lambda = es.eigenvalues().minCoeff();
  if (!(lambda > 0.0)) return std::numeric_limits<double>::infinity();

  // Explicit sum to J plus the geometric remainder beyond J.
  auto tail_from = [lambda](std::int64_t start) {
    const std::int64_t stop = start + static_cast<std::int64_t>(std::ceil(std::sqrt(80.0 / lambda))) + 1;
    double s = 0.0;
    for (std::int64_t j = stop; j >= start; --j) s += std::exp(-lambda * double(j) * double(j));
    const double nxt = double(stop + 1);
    s += std::exp(-lambda * nxt * nxt) / (1.0 - std::exp(-lambda * (2.0 * nxt + 1.0)));
    return s;
  };
  const double t1 = tail_from(radius + 1);
  const double t0 = 1.0 + 2.0 * tail_from(1);
  return std::pow(theta_i0_upper(), q) * d * 2.0 * t1 * std::pow(t0, d - 1);
}

DecayFit decay_fit(const QuantumElement& x) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& [k, c] : x.coeffs()) {
    const double mag = std::abs(c);
    if (!(mag > 0.0)) continue;
    double r2 = 0.0;
    for (auto v : k) r2 += double(v) * double(v);
    const double y = std::log(mag);
    sx += r2;
    sy += y;
    sxx += r2 * r2;
    sxy += r2 * y;
    ++n;
  }
  DecayFit fit;
  fit.points = n;
  const double den = double(n) * sxx - sx * sx;
  if (n < 2 || den == 0.0) return fit;
  fit.slope = (double(n) * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / double(n);
  return fit;
}

}  // namespace nctheta
