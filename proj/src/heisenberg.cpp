#include "nctheta/heisenberg.hpp"

#include "nctheta/errors.hpp"

#include <cmath>
#include <ostream>

namespace nctheta {

namespace {

constexpr double kSymmetryTol = 1e-12;

void check_point(const GaussianVector& f, const LatticePoint& h) {
  if (h.p() != f.p() || h.q() != f.q()) {
    throw Error(ErrorCode::DimensionMismatch, "lattice point and module vector differ in (p,q)");
  }
}

}  // namespace

GaussianVector GaussianVector::theta_vector(const CMatrix& omega, int q) {
  GaussianVector f;
  f.omega = omega;
  f.ell = CVector::Zero(omega.rows());
  f.c0 = 1.0;
  f.n0 = IVector::Zero(q);
  f.mu = CVector::Zero(q);
  f.validate();
  return f;
}

cplx GaussianVector::operator()(const RVector& s, const IVector& n) const {
  const CVector sc = s.cast<cplx>();
  // Eigen's dot() conjugates its left operand, so use plain transposes.
  cplx e = kI * kPi * (sc.transpose() * omega * sc)(0, 0) + 2.0 * kPi * kI * (ell.transpose() * sc)(0, 0);
  const RVector dn = (n - n0).cast<double>();
  e += -0.5 * kPi * dn.squaredNorm();
  e += 2.0 * kPi * kI * (mu.transpose() * n.cast<double>().cast<cplx>())(0, 0);
  return c0 * std::exp(e);
}

void GaussianVector::validate() const {
  const int pp = p();
  if (omega.cols() != pp || ell.size() != pp || mu.size() != n0.size()) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent GaussianVector block sizes");
  }
  if (pp == 0) return;
  if (max_abs(omega - omega.transpose()) > kSymmetryTol) {
    throw Error(ErrorCode::InvalidArgument, "Omega is not symmetric");
  }
  const RMatrix im = omega.imag();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (im + im.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "Im Omega is not positive definite");
  }
}

ModuleFunction as_function(const GaussianVector& f) {
  return [f](const RVector& s, const IVector& n) { return f(s, n); };
}

ModuleFunction pi_pointwise(const LatticePoint& h, ModuleFunction f) {
  return [h, f = std::move(f)](const RVector& s, const IVector& n) {
    const RVector nd = n.cast<double>();
    const RVector md = h.m.cast<double>();
    const double phase = 2.0 * kPi * (h.w2.dot(s) + h.r.dot(nd)) + kPi * (h.w1.dot(h.w2) + md.dot(h.r));
    const RVector s_shift = s + h.w1;
    const IVector n_shift = n + h.m;
    return std::polar(1.0, phase) * f(s_shift, n_shift);
  };
}

GaussianVector apply_pi(const LatticePoint& h, const GaussianVector& f) {
  check_point(f, h);
  const CVector w1 = h.w1.cast<cplx>();
  const CVector w2 = h.w2.cast<cplx>();
  const RVector md = h.m.cast<double>();

  GaussianVector out = f;
  out.ell = f.ell + f.omega * w1 + w2;
  out.n0 = f.n0 - h.m;
  out.mu = f.mu + h.r.cast<cplx>();

  cplx e = kI * kPi * (h.w1.dot(h.w2) + md.dot(h.r));
  e += kI * kPi * (w1.transpose() * f.omega * w1)(0, 0);
  e += 2.0 * kPi * kI * (f.ell.transpose() * w1)(0, 0);
  e += 2.0 * kPi * kI * (f.mu.transpose() * md.cast<cplx>())(0, 0);
  out.c0 = f.c0 * std::exp(e);
  return out;
}

GaussianVector apply_generator(const EmbeddingMap& emb, int j, const GaussianVector& f) {
  if (j < 0 || j >= emb.d()) throw Error(ErrorCode::DimensionMismatch, "generator index out of range");
  Index e(emb.d(), 0);
  e[j] = 1;
  return apply_pi(lattice_point(emb, e), f);
}

RMatrix connection_matrix(const EmbeddingMap& emb) {
  const RMatrix xt = emb.x_tilde();
  Eigen::FullPivLU<RMatrix> lu(xt);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularEmbedding, "X~ is not invertible");
  RMatrix b = lu.inverse();
  if (max_abs(b * xt - RMatrix::Identity(emb.d(), emb.d())) >= 1e-10) {
    throw Error(ErrorCode::SingularEmbedding, "X~ too ill-conditioned to invert to 1e-10");
  }
  return b;
}

cplx ConnectedVector::operator()(const RVector& s, const IVector& n) const {
  cplx poly = constant;
  poly += (s_coeff.transpose() * s.cast<cplx>())(0, 0);
  poly += (n_coeff.transpose() * n.cast<double>().cast<cplx>())(0, 0);
  return poly * base(s, n);
}

ConnectedVector apply_connection_combination(const EmbeddingMap& emb, const CVector& weights,
                                             const GaussianVector& f) {
  const int p = emb.p();
  const int q = emb.q();
  const int d = emb.d();
  if (f.p() != p || f.q() != q) throw Error(ErrorCode::DimensionMismatch, "vector/embedding (p,q) differ");
  if (weights.size() > d) throw Error(ErrorCode::DimensionMismatch, "too many connection weights");

  const RMatrix b = connection_matrix(emb);
  CVector row = CVector::Zero(d);
  for (Eigen::Index i = 0; i < weights.size(); ++i) row += weights(i) * b.row(i).transpose().cast<cplx>();

  const CVector mult = row.segment(0, p);   // coefficients of -2 pi i s_k
  const CVector deriv = row.segment(p, p);  // coefficients of d/ds_k
  const CVector nmul = row.segment(2 * p, q);

  ConnectedVector out;
  out.base = f;
  // d f / d s_k = 2 pi i ((Omega s)_k + ell_k) f
  out.s_coeff = -2.0 * kPi * kI * mult + 2.0 * kPi * kI * (f.omega.transpose() * deriv);
  out.n_coeff = -2.0 * kPi * kI * nmul;
  out.constant = 2.0 * kPi * kI * (deriv.transpose() * f.ell)(0, 0);
  return out;
}

ConnectedVector apply_connection(const EmbeddingMap& emb, int j, const GaussianVector& f) {
  if (j < 0 || j >= emb.d()) throw Error(ErrorCode::DimensionMismatch, "connection index out of range");
  CVector w = CVector::Zero(emb.d());
  w(j) = 1.0;
  return apply_connection_combination(emb, w, f);
}

cplx apply_connection_fd(const EmbeddingMap& emb, int j, const ModuleFunction& f, const RVector& s,
                         const IVector& n, double step) {
  const int p = emb.p();
  const int q = emb.q();
  if (j < 0 || j >= emb.d()) throw Error(ErrorCode::DimensionMismatch, "connection index out of range");
  if (s.size() != p || n.size() != q) throw Error(ErrorCode::DimensionMismatch, "point has wrong (p,q)");
  const RMatrix b = connection_matrix(emb);

  double lin = 0.0;
  for (int k = 0; k < p; ++k) lin += b(j, k) * s(k);
  for (int l = 0; l < q; ++l) lin += b(j, 2 * p + l) * static_cast<double>(n(l));
  cplx out = -2.0 * kPi * kI * lin * f(s, n);
  for (int k = 0; k < p; ++k) {
    if (b(j, p + k) == 0.0) continue;
    RVector sp = s, sm = s;
    sp(k) += step;
    sm(k) -= step;
    out += b(j, p + k) * (f(sp, n) - f(sm, n)) / (2.0 * step);
  }
  return out;
}

SampledVector::SampledVector(int p, int q, double grid_radius, double step, int lattice_radius)
    : p_(p), q_(q), grid_radius_(grid_radius), step_(step), lattice_radius_(lattice_radius) {
  if (p < 0 || q < 0) throw Error(ErrorCode::InvalidArgument, "negative p or q");
  if (!(grid_radius > 0.0) || !(step > 0.0) || lattice_radius < 0) {
    throw Error(ErrorCode::InvalidArgument, "grid radius and step must be positive");
  }
  const double cells = 2.0 * grid_radius / step;
  if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
    throw Error(ErrorCode::InvalidArgument, "step must divide 2L evenly");
  }
  s_count_ = static_cast<int>(std::lround(cells)) + 1;
}

void SampledVector::coordinates(std::size_t idx, RVector& s, IVector& n) const {
  s.resize(p_);
  n.resize(q_);
  const std::size_t nn = static_cast<std::size_t>(points_per_n_axis());
  for (int l = q_ - 1; l >= 0; --l) {
    n(l) = static_cast<std::int64_t>(idx % nn) - lattice_radius_;
    idx /= nn;
  }
  for (int k = p_ - 1; k >= 0; --k) {
    s(k) = -grid_radius_ + step_ * static_cast<double>(idx % static_cast<std::size_t>(s_count_));
    idx /= static_cast<std::size_t>(s_count_);
  }
}

std::size_t SampledVector::locate(const std::vector<int>& s_steps, const IVector& n) const {
  std::size_t idx = 0;
  for (int k = 0; k < p_; ++k) {
    if (s_steps[k] < 0 || s_steps[k] >= s_count_) return npos;
    idx = idx * static_cast<std::size_t>(s_count_) + static_cast<std::size_t>(s_steps[k]);
  }
  for (int l = 0; l < q_; ++l) {
    const auto v = n(l) + lattice_radius_;
    if (v < 0 || v >= points_per_n_axis()) return npos;
    idx = idx * static_cast<std::size_t>(points_per_n_axis()) + static_cast<std::size_t>(v);
  }
  return idx;
}

bool SampledVector::same_grid(const SampledVector& o) const {
  return p_ == o.p_ && q_ == o.q_ && grid_radius_ == o.grid_radius_ && step_ == o.step_ &&
         lattice_radius_ == o.lattice_radius_;
}

void SampledVector::write_csv(std::ostream& os) const {
  for (int k = 0; k < p_; ++k) os << "s" << k + 1 << ",";
  for (int l = 0; l < q_; ++l) os << "n" << l + 1 << ",";
  os << "re,im\n";
  RVector s;
  IVector n;
  char buf[32];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    coordinates(i, s, n);
    for (int k = 0; k < p_; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", s(k));
      os << buf << ",";
    }
    for (int l = 0; l < q_; ++l) os << n(l) << ",";
    std::snprintf(buf, sizeof buf, "%.17g", values_[i].real());
    os << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", values_[i].imag());
    os << buf << "\n";
  }
}

SampledVector sample(const ModuleFunction& f, int p, int q, double grid_radius, double step,
                     int lattice_radius, std::size_t budget) {
  SampledVector out(p, q, grid_radius, step, lattice_radius);
  const double total = std::pow(static_cast<double>(out.points_per_s_axis()), p) *
                       std::pow(static_cast<double>(out.points_per_n_axis()), q);
  if (total > static_cast<double>(budget)) {
    throw Error(ErrorCode::GridTooLarge, "grid has " + std::to_string(total) + " points");
  }
  auto& vals = out.values();
  vals.resize(static_cast<std::size_t>(total));
  RVector s;
  IVector n;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out.coordinates(i, s, n);
    vals[i] = f(s, n);
  }
  return out;
}

SampledVector sample(const GaussianVector& f, double grid_radius, double step, int lattice_radius,
                     std::size_t budget) {
  return sample(as_function(f), f.p(), f.q(), grid_radius, step, lattice_radius, budget);
}

}  // namespace nctheta
