#pragma once

// The Heisenberg module S(R^p x Z^q): closed-form Gaussian vectors, the
// operators pi_h and U_j, the connections nabla_j, and sampled grids used as
// numerical oracles.

#include "nctheta/lattice_core.hpp"

#include <functional>
#include <iosfwd>

namespace nctheta {

/// f(s,n) = c0 exp(pi i s^T Omega s + 2 pi i ell.s) exp(-(pi/2)|n - n0|^2 + 2 pi i mu.n)
///
/// The family is closed under every pi_h, which shifts ell, n0, mu and c0 and
/// leaves Omega untouched.
struct GaussianVector {
  CMatrix omega;
  CVector ell;
  cplx c0{1.0, 0.0};
  IVector n0;
  CVector mu;

  int p() const noexcept { return static_cast<int>(omega.rows()); }
  int q() const noexcept { return static_cast<int>(n0.size()); }

  /// exp(pi i s^T Omega s - (pi/2)|n|^2): the standard theta vector.
  static GaussianVector theta_vector(const CMatrix& omega, int q);

  cplx operator()(const RVector& s, const IVector& n) const;

  /// Throws InvalidArgument unless Omega is symmetric and Im Omega > 0.
  void validate() const;
};

/// Any element of the module evaluated pointwise.
using ModuleFunction = std::function<cplx(const RVector&, const IVector&)>;

ModuleFunction as_function(const GaussianVector& f);

/// Direct evaluation of
///   (pi_h F)(s,n) = exp(2 pi i (w2.s + r.n) + pi i (w1.w2 + m.r)) F(s + w1, n + m).
ModuleFunction pi_pointwise(const LatticePoint& h, ModuleFunction f);

/// pi_h f in closed form.
GaussianVector apply_pi(const LatticePoint& h, const GaussianVector& f);

/// U_j f = pi_{Phi e_j} f, generator index j in [0, d).
GaussianVector apply_generator(const EmbeddingMap& emb, int j, const GaussianVector& f);

/// B = X~^{-1}; the rows define the connections nabla_j.
RMatrix connection_matrix(const EmbeddingMap& emb);

/// (constant + s_coeff.s + n_coeff.n) * base(s,n): the shape of nabla_j f.
struct ConnectedVector {
  cplx constant{};
  CVector s_coeff;
  CVector n_coeff;
  GaussianVector base;

  cplx operator()(const RVector& s, const IVector& n) const;
};

/// nabla_j f, j in [0, d).
ConnectedVector apply_connection(const EmbeddingMap& emb, int j, const GaussianVector& f);

/// sum_j weights_j nabla_j f for a complex weight row of length d (or a
/// prefix of it); used for the anti-holomorphic combinations.
ConnectedVector apply_connection_combination(const EmbeddingMap& emb, const CVector& weights,
                                             const GaussianVector& f);

/// nabla_j F at (s,n) with the s-derivatives taken by central differences.
cplx apply_connection_fd(const EmbeddingMap& emb, int j, const ModuleFunction& f, const RVector& s,
                         const IVector& n, double step = 1e-5);

/// Values of a module function on {-L, -L+step, ..., L}^p x {-N..N}^q.
///
/// Storage is row-major with the s axes first, then the n axes.
class SampledVector {
 public:
  static constexpr std::size_t kDefaultBudget = 10'000'000;

  SampledVector(int p, int q, double grid_radius, double step, int lattice_radius);

  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  double grid_radius() const noexcept { return grid_radius_; }
  double step() const noexcept { return step_; }
  int lattice_radius() const noexcept { return lattice_radius_; }

  int points_per_s_axis() const noexcept { return s_count_; }
  int points_per_n_axis() const noexcept { return 2 * lattice_radius_ + 1; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Grid coordinates of flat position idx.
  void coordinates(std::size_t idx, RVector& s, IVector& n) const;
  /// Flat position of grid coordinates, or npos when outside the grid.
  std::size_t locate(const std::vector<int>& s_steps, const IVector& n) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<cplx>& values() noexcept { return values_; }

  bool same_grid(const SampledVector& o) const;

  /// One line per grid point: s_1..s_p, n_1..n_q, re, im.
  void write_csv(std::ostream& os) const;

 private:
  int p_;
  int q_;
  double grid_radius_;
  double step_;
  int lattice_radius_;
  int s_count_;
  std::vector<cplx> values_;
};

SampledVector sample(const ModuleFunction& f, int p, int q, double grid_radius, double step,
                     int lattice_radius, std::size_t budget = SampledVector::kDefaultBudget);

SampledVector sample(const GaussianVector& f, double grid_radius, double step, int lattice_radius,
                     std::size_t budget = SampledVector::kDefaultBudget);

}  // namespace nctheta
