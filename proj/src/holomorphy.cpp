#include "nctheta/holomorphy.hpp"

#include "nctheta/errors.hpp"

#include <random>

namespace nctheta {

namespace {

constexpr double kRankTol = 1e-8;
constexpr double kSymmetryTol = 1e-10;
constexpr double kPositivityTol = 1e-12;
constexpr double kCouplingTol = 1e-12;
constexpr double kHolomorphyTol = 1e-9;

struct Blocks {
  CMatrix a, c, f;
};

// (T1, T2) B_rows split into column blocks A (p), C (p), F (q).
Blocks split_acf(const CMatrix& t, const RMatrix& b_rows, int p, int q) {
  const CMatrix acf = t * b_rows.cast<cplx>();
  return {acf.leftCols(p), acf.middleCols(p, p), acf.rightCols(q)};
}

CMatrix hstack(const CMatrix& l, const CMatrix& r) {
  CMatrix out(l.rows(), l.cols() + r.cols());
  out << l, r;
  return out;
}

double min_imag_eig(const CMatrix& omega) {
  if (omega.size() == 0) return 0.0;
  const RMatrix im = omega.imag();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (im + im.transpose()));
  return es.eigenvalues().minCoeff();
}

void check_square(const CMatrix& m, int n, const char* name) {
  if (m.rows() != n || m.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
  }
}

}  // namespace

std::string_view to_string(HolomorphyResult::Variant v) noexcept {
  switch (v) {
    case HolomorphyResult::Variant::UniqueSolution: return "unique";
    case HolomorphyResult::Variant::NonExistent: return "nonexistent";
    case HolomorphyResult::Variant::DeltaOnly: return "delta_only";
  }
  return "unknown";
}

HolomorphyResult classify_holomorphic(const EmbeddingMap& emb, const ComplexStructure& cs) {
  if (cs.kind != ComplexStructure::Kind::Full) {
    throw Error(ErrorCode::InvalidArgument, "classifier needs a Full complex structure");
  }
  const int p = emb.p();
  const int q = emb.q();
  const int d = emb.d();
  if (d % 2 != 0) throw Error(ErrorCode::OddDimension, "2p+q is odd; no full complex structure");
  const int half = d / 2;
  check_square(cs.t1, half, "T1");
  check_square(cs.t2, half, "T2");
  const CMatrix t = hstack(cs.t1, cs.t2);
  if (numerical_rank(t, kRankTol) < half) {
    throw Error(ErrorCode::InvalidComplexStructure, "(T1, T2) is rank deficient");
  }

  const RMatrix b = connection_matrix(emb);
  const Blocks blk = split_acf(t, b, p, q);

  HolomorphyResult res;
  auto& w = res.witness;
  w.a = blk.a;
  w.c = blk.c;
  w.f = blk.f;
  w.left_rank = numerical_rank(blk.c, kRankTol);
  w.required_rank = numerical_rank(t * b.cast<cplx>(), kRankTol);

  if (p == 0) {
    res.variant = HolomorphyResult::Variant::DeltaOnly;
    res.note =
        "(F n) f(n) = 0 forces support at n = 0; a nonzero solution needs the connection to vanish there, "
        "so no holomorphic Schwartz vector exists";
    return res;
  }
  if (q != 0) {
    res.variant = HolomorphyResult::Variant::NonExistent;
    w.failed_condition = "rank: C (Omega, I, G^t) has rank <= p < p + q/2";
    return res;
  }

  // q = 0: C = T1 B12 + T2 B22, A = T1 B11 + T2 B21.
  if (w.left_rank < p) {
    res.variant = HolomorphyResult::Variant::NonExistent;
    w.failed_condition = "(1) T1 B12 + T2 B22 is singular";
    return res;
  }
  const CMatrix raw = blk.c.fullPivLu().solve(blk.a);
  w.symmetry_residual = max_abs(raw - raw.transpose());
  const CMatrix omega = 0.5 * (raw + raw.transpose());
  w.min_imag_eigenvalue = min_imag_eig(omega);
  w.substitution_residual = max_abs(blk.c * omega - blk.a);

  if (w.symmetry_residual > kSymmetryTol) {
    res.variant = HolomorphyResult::Variant::NonExistent;
    w.failed_condition = "(2) Omega is not symmetric";
    return res;
  }
  if (!(w.min_imag_eigenvalue > kPositivityTol)) {
    res.variant = HolomorphyResult::Variant::NonExistent;
    w.failed_condition = "(3) Im Omega is not positive definite";
    return res;
  }
  res.variant = HolomorphyResult::Variant::UniqueSolution;
  res.omega = omega;
  res.g = CMatrix::Zero(0, p);
  return res;
}

NonexistenceSearchReport verify_nonexistence_by_search(const EmbeddingMap& emb, const ComplexStructure& cs,
                                                       int trials, std::uint64_t seed) {
  const int p = emb.p();
  const int q = emb.q();
  const int d = emb.d();
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "search needs p >= 1");
  if (d % 2 != 0) throw Error(ErrorCode::OddDimension, "2p+q is odd; no full complex structure");
  const int half = d / 2;
  check_square(cs.t1, half, "T1");
  check_square(cs.t2, half, "T2");
  const CMatrix t = hstack(cs.t1, cs.t2);
  const RMatrix b = connection_matrix(emb);
  const Blocks blk = split_acf(t, b, p, q);

  NonexistenceSearchReport rep;
  rep.left_rank = numerical_rank(blk.c, kRankTol);
  rep.required_rank = numerical_rank(t * b.cast<cplx>(), kRankTol);
  rep.rank_certificate = rep.left_rank < rep.required_rank;

  // Symmetric Omega parametrised by its upper triangle: vec(C Omega) = K omega_upper.
  const int nsym = p * (p + 1) / 2;
  CMatrix k = CMatrix::Zero(static_cast<Eigen::Index>(half) * p, nsym);
  int col = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j, ++col) {
      // Omega_ij = Omega_ji = 1 contributes C(:,i) to column j and C(:,j) to column i.
      k.block(static_cast<Eigen::Index>(j) * half, col, half, 1) += blk.c.col(i);
      if (i != j) k.block(static_cast<Eigen::Index>(i) * half, col, half, 1) += blk.c.col(j);
    }
  }
  const CVector rhs = Eigen::Map<const CVector>(blk.a.data(), blk.a.size());
  const CVector upper = k.completeOrthogonalDecomposition().solve(rhs);
  CMatrix omega(p, p);
  col = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j, ++col) omega(i, j) = omega(j, i) = upper(col);
  }
  const CMatrix gt = q > 0 ? CMatrix(blk.c.completeOrthogonalDecomposition().solve(blk.f)) : CMatrix(p, 0);

  auto residual = [&](const CMatrix& om, const CMatrix& g_t, double* max_entry) {
    const CMatrix r1 = blk.c * om - blk.a;
    const CMatrix r2 = blk.c * g_t - blk.f;
    if (max_entry) *max_entry = std::max(max_abs(r1), max_abs(r2));
    return std::sqrt(r1.squaredNorm() + r2.squaredNorm());
  };
  rep.best_residual = residual(omega, gt, &rep.best_residual_max);
  rep.omega = omega;
  rep.g = gt.transpose();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  rep.trials = trials;
  rep.min_trial_residual = std::numeric_limits<double>::infinity();
  for (int tr = 0; tr < trials; ++tr) {
    CMatrix dom(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = i; j < p; ++j) dom(i, j) = dom(j, i) = 1e-3 * cplx(nd(rng), nd(rng));
    }
    CMatrix dg(p, q);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < q; ++j) dg(i, j) = 1e-3 * cplx(nd(rng), nd(rng));
    }
    rep.min_trial_residual = std::min(rep.min_trial_residual, residual(omega + dom, gt + dg, nullptr));
  }
  return rep;
}

ThetaVectorResult build_theta_vector(const EmbeddingMap& emb, const ComplexStructure& cs) {
  if (cs.kind != ComplexStructure::Kind::Partial) {
    throw Error(ErrorCode::InvalidArgument, "theta vector construction needs a Partial complex structure");
  }
  const int p = emb.p();
  const int q = emb.q();
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "partial structure needs p >= 1");
  check_square(cs.t1, p, "T1");
  check_square(cs.t2, p, "T2");
  const CMatrix t = hstack(cs.t1, cs.t2);
  if (numerical_rank(t, kRankTol) < p) {
    throw Error(ErrorCode::InvalidComplexStructure, "(T1, T2) is rank deficient");
  }

  const RMatrix b = connection_matrix(emb);
  const Blocks blk = split_acf(t, b.topRows(2 * p), p, q);
  if (numerical_rank(blk.c, kRankTol) < p) {
    throw Error(ErrorCode::NoPartialStructure, "(1) T1 B12 + T2 B22 is singular");
  }
  const auto lu = blk.c.fullPivLu();
  const CMatrix raw = lu.solve(blk.a);

  ThetaVectorResult out;
  out.symmetry_residual = max_abs(raw - raw.transpose());
  if (out.symmetry_residual > kSymmetryTol) {
    throw Error(ErrorCode::NoPartialStructure, "(2) Omega is not symmetric");
  }
  const CMatrix omega = 0.5 * (raw + raw.transpose());
  out.min_imag_eigenvalue = min_imag_eig(omega);
  if (!(out.min_imag_eigenvalue > kPositivityTol)) {
    throw Error(ErrorCode::NoPartialStructure, "(3) Im Omega is not positive definite");
  }
  out.substitution_residual = max_abs(blk.c * omega - blk.a);
  out.g = q > 0 ? CMatrix(lu.solve(blk.f).transpose()) : CMatrix(0, p);
  if (max_abs(out.g) > kCouplingTol) {
    throw Error(ErrorCode::NoPartialStructure,
                "holomorphy needs an s-n coupling G != 0, outside the Gaussian vector family");
  }
  out.vector = GaussianVector::theta_vector(omega, q);

  // Certificate: every nabla-bar_alpha annihilates the vector pointwise.
  std::mt19937_64 rng(0x7e7a);
  std::uniform_real_distribution<double> us(-1.0, 1.0);
  std::uniform_int_distribution<int> un(-2, 2);
  std::vector<ConnectedVector> bars;
  for (int alpha = 0; alpha < p; ++alpha) {
    bars.push_back(apply_connection_combination(emb, t.row(alpha).transpose(), out.vector));
  }
  for (int trial = 0; trial < 20; ++trial) {
    RVector s(p);
    IVector n(q);
    for (int k = 0; k < p; ++k) s(k) = us(rng);
    for (int l = 0; l < q; ++l) n(l) = un(rng);
    for (const auto& bar : bars) out.holomorphy_residual = std::max(out.holomorphy_residual, std::abs(bar(s, n)));
  }
  if (out.holomorphy_residual >= kHolomorphyTol) {
    throw Error(ErrorCode::NoPartialStructure, "holomorphy certificate failed");
  }
  return out;
}

}  // namespace nctheta
