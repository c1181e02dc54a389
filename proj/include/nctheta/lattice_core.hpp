#pragma once

// Embedding matrices Phi : Z^d -> R^p x R^p* x Z^q x T^q, the lattice D they
// generate, the Heisenberg cocycle on D, and truncated twisted sums over D.

#include "nctheta/linalg.hpp"

#include <map>
#include <optional>

namespace nctheta {

/// Full-rank embedding of Z^d, d = 2p+q, into R^p x R^p* x Z^q x T^q.
///
/// Rows of phi are ordered in four blocks (R^p, R^p*, Z^q, T^q). The upper
/// (2p+q)x(2p+q) block X~ must be invertible and the Z^q rows integral.
class EmbeddingMap {
 public:
  /// Validates and wraps a raw (2p+2q) x (2p+q) matrix.
  static EmbeddingMap from_phi(int p, int q, const RMatrix& phi);

  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  int d() const noexcept { return 2 * p_ + q_; }
  const RMatrix& phi() const noexcept { return phi_; }
  /// Upper square block formed by the R^p, R^p* and Z^q rows.
  RMatrix x_tilde() const { return phi_.topRows(d()); }

  bool operator==(const EmbeddingMap& other) const {
    return p_ == other.p_ && q_ == other.q_ && phi_ == other.phi_;
  }

 private:
  EmbeddingMap(int p, int q, RMatrix phi) : p_(p), q_(q), phi_(std::move(phi)) {}

  int p_;
  int q_;
  RMatrix phi_;
};

/// Block-diagonal embedding diag(Theta, I_p, Q, Delta).
EmbeddingMap canonical_embedding(int p, int q, const RVector& theta, const RMatrix& Q,
                                 const RMatrix& Delta);

/// h = Phi k split into its four blocks. The T^q block is kept as given reals.
struct LatticePoint {
  Index index;
  RVector w1;
  RVector w2;
  IVector m;
  RVector r;

  int p() const noexcept { return static_cast<int>(w1.size()); }
  int q() const noexcept { return static_cast<int>(m.size()); }
  bool is_zero() const;
};

LatticePoint lattice_point(const EmbeddingMap& emb, const Index& k);

LatticePoint operator+(const LatticePoint& a, const LatticePoint& b);
LatticePoint operator-(const LatticePoint& a);

/// alpha(x,y) = exp(pi i (x.w1 . y.w2 + x.m . y.r - y.w1 . x.w2 - y.m . x.r)).
cplx cocycle(const LatticePoint& x, const LatticePoint& y);

/// Real exponent E(x,y) with alpha(x,y) = exp(pi i E(x,y)).
double cocycle_exponent(const LatticePoint& x, const LatticePoint& y);

/// theta'_{ij} with U_i U_j = exp(2 pi i theta'_{ij}) U_j U_i.
RMatrix induced_theta(const EmbeddingMap& emb);

/// Finite sum  sum_k c(k) e(Phi k)  over |k|_inf <= radius.
class QuantumElement {
 public:
  using CoeffMap = std::map<Index, cplx>;

  static constexpr double kDefaultDropThreshold = 1e-300;

  QuantumElement(EmbeddingMap emb, std::int64_t radius);

  /// Basis element e(Phi k) with coefficient c; radius defaults to |k|_inf.
  static QuantumElement basis(const EmbeddingMap& emb, const Index& k, cplx c = 1.0);

  const EmbeddingMap& embedding() const noexcept { return emb_; }
  std::int64_t radius() const noexcept { return radius_; }
  const CoeffMap& coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  /// Coefficient at k, zero when absent.
  cplx coeff(const Index& k) const;

  /// Stores c at k (or erases it when |c| < drop threshold). Throws when k is
  /// outside the radius or has the wrong length.
  void set(const Index& k, cplx c);
  void add(const Index& k, cplx c);

  double drop_threshold() const noexcept { return drop_; }
  void set_drop_threshold(double t) noexcept { drop_ = t; }

 private:
  void check_key(const Index& k) const;

  EmbeddingMap emb_;
  std::int64_t radius_;
  double drop_ = kDefaultDropThreshold;
  CoeffMap coeffs_;
};

/// Twisted convolution: (ab)(k) = sum_{k1+k2=k} a(k1) b(k2) alpha(Phi k1, Phi k2).
QuantumElement qel_multiply(const QuantumElement& a, const QuantumElement& b);

}  // namespace nctheta
