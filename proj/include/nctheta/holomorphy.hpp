#pragma once

// Complex structures on the connection, the existence classifier for
// holomorphic vectors, and construction of the partially holomorphic theta
// vector over the R^p x R^p* sector.

#include "nctheta/heisenberg.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace nctheta {

struct ComplexStructure {
  enum class Kind { Full, Partial };

  Kind kind = Kind::Full;
  /// Full: both (d/2)x(d/2). Partial: both p x p, acting on nabla_1..nabla_2p.
  CMatrix t1;
  CMatrix t2;
};

/// Diagnostic record attached to every classifier result.
struct HolomorphyWitness {
  int left_rank = 0;      ///< rank of C, an upper bound for the rank of C (Omega, I, G^t)
  int required_rank = 0;  ///< rank of (A, C, F) = (T1, T2) B
  double symmetry_residual = 0.0;
  double min_imag_eigenvalue = 0.0;
  double substitution_residual = 0.0;
  std::string failed_condition;
  CMatrix a;
  CMatrix c;
  CMatrix f;
};

struct HolomorphyResult {
  enum class Variant { UniqueSolution, NonExistent, DeltaOnly };

  Variant variant = Variant::NonExistent;
  CMatrix omega;             ///< UniqueSolution only
  std::optional<CMatrix> g;  ///< q x p coupling, absent unless computed
  HolomorphyWitness witness;
  std::string note;
};

std::string_view to_string(HolomorphyResult::Variant v) noexcept;

/// Decides whether a fully holomorphic vector exists for a Full structure.
HolomorphyResult classify_holomorphic(const EmbeddingMap& emb, const ComplexStructure& cs);

struct NonexistenceSearchReport {
  int left_rank = 0;
  int required_rank = 0;
  bool rank_certificate = false;  ///< left_rank < required_rank
  double best_residual = 0.0;     ///< Frobenius residual of the least-squares (Omega, G)
  double best_residual_max = 0.0;
  double min_trial_residual = 0.0;  ///< smallest residual among perturbed candidates
  int trials = 0;
  CMatrix omega;
  CMatrix g;
};

/// Least-squares fit of C (Omega, I, G^t) = (A, C, F) over symmetric Omega and
/// arbitrary G, followed by `trials` seeded perturbations of the optimum.
NonexistenceSearchReport verify_nonexistence_by_search(const EmbeddingMap& emb, const ComplexStructure& cs,
                                                       int trials, std::uint64_t seed = 0);

struct ThetaVectorResult {
  GaussianVector vector;
  CMatrix g;  ///< q x p, zero whenever the vector is returned
  double symmetry_residual = 0.0;
  double min_imag_eigenvalue = 0.0;
  double substitution_residual = 0.0;
  double holomorphy_residual = 0.0;  ///< max |nabla-bar_alpha f| over 20 sample points
};

/// exp(pi i s^T Omega s - (pi/2)|n|^2) annihilated by the p operators
/// (T1, T2)(nabla_1 .. nabla_2p).
ThetaVectorResult build_theta_vector(const EmbeddingMap& emb, const ComplexStructure& cs);

}  // namespace nctheta
