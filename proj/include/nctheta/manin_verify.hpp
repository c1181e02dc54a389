#pragma once

// Quantum translations, the factors C_g and C^_g, and numerical verification
// of the functional equation, the cocycle-consistency law and the
// additivity dichotomy between vector-space and lattice embeddings.

#include "nctheta/errors.hpp"
#include "nctheta/theta_engine.hpp"

#include <cstdint>
#include <map>
#include <optional>

namespace nctheta {

enum class TranslationKind { Manin, Modified };

std::string_view to_string(TranslationKind k) noexcept;

inline constexpr double kDegeneracyTol = 1e-14;
inline constexpr double kFunctionalEquationTol = 1e-9;

/// Raised before any division by a vanishing C^_h.
class DegenerateTranslationError : public Error {
 public:
  DegenerateTranslationError(std::vector<Index> offending, const std::string& what)
      : Error(ErrorCode::DegenerateTranslation, what), offending_(std::move(offending)) {}

  const std::vector<Index>& offending() const noexcept { return offending_; }

 private:
  std::vector<Index> offending_;
};

struct TranslationFactor {
  LatticePoint g;
  cplx value{};
  TranslationKind kind = TranslationKind::Manin;
  bool degenerate = false;
};

/// Manin: C_g = exp(-(pi/2) H(g,g)).  Modified: C^_g = b~_g exp(-(pi/2) H(g,g)).
///
/// A Modified factor is degenerate when one of its b-factors sits on a zero of
/// theta (|exp(pi m^2/4) b_{r,m}| < 1e-14) or the product underflows.
TranslationFactor translation_factor(const HermitianFormContext& ctx, const EmbeddingMap& emb,
                                     const LatticePoint& g, TranslationKind kind);

/// Multiplier of x_g* on e(h): exp(-pi H(g,h)) for Manin, and
/// C^_{g+h} / (C^_g C^_h alpha(g,h)) for Modified.
cplx translation_multiplier(const HermitianFormContext& ctx, const EmbeddingMap& emb, const LatticePoint& g,
                            const LatticePoint& h, TranslationKind kind);

/// Memoised translation factors keyed by lattice index. Not thread-safe;
/// give each worker its own table.
class FactorTable {
 public:
  FactorTable(const HermitianFormContext& ctx, const EmbeddingMap& emb, TranslationKind kind)
      : ctx_(ctx), emb_(emb), kind_(kind) {}

  const TranslationFactor& at(const Index& k);

  const HermitianFormContext& context() const noexcept { return ctx_; }
  const EmbeddingMap& embedding() const noexcept { return emb_; }
  TranslationKind kind() const noexcept { return kind_; }

 private:
  const HermitianFormContext& ctx_;
  const EmbeddingMap& emb_;
  TranslationKind kind_;
  std::map<Index, TranslationFactor> cache_;
};

/// Coefficient-wise action of x_g* on x. Support is preserved exactly.
QuantumElement translate(const HermitianFormContext& ctx, const EmbeddingMap& emb, const LatticePoint& g,
                         const QuantumElement& x, TranslationKind kind);
QuantumElement translate(FactorTable& table, const LatticePoint& g, const QuantumElement& x);

struct FunctionalEquationReport {
  Index g;
  TranslationKind kind = TranslationKind::Manin;
  std::int64_t interior_radius = 0;
  std::size_t compared = 0;
  double max_residual = 0.0;
  double threshold = kFunctionalEquationTol;
  bool passed = false;
};

/// Compares C_g e(g) x_g*(theta) against theta on |k|_inf <= R - |g|_inf.
FunctionalEquationReport verify_functional_equation(const HermitianFormContext& ctx, const EmbeddingMap& emb,
                                                    const QuantumElement& theta, const LatticePoint& g,
                                                    TranslationKind kind);
FunctionalEquationReport verify_functional_equation(FactorTable& table, const QuantumElement& theta,
                                                    const LatticePoint& g);

struct CocycleReport {
  TranslationKind kind = TranslationKind::Manin;
  std::size_t pairs = 0;
  double max_modulus_residual = 0.0;  ///< Manin: max ||LHS/RHS| - 1|
  double max_phase_residual = 0.0;    ///< Manin: max |arg(LHS/RHS)|
  double max_definitional_residual = 0.0;  ///< Modified: ratio vs translate() read-off
  double threshold = 0.0;
  bool passed = false;
};

CocycleReport verify_cocycle_consistency(const HermitianFormContext& ctx, const EmbeddingMap& emb,
                                         TranslationKind kind,
                                         const std::vector<std::pair<LatticePoint, LatticePoint>>& sample);

struct AdditivityWitness {
  Index g1, g2, h;
  cplx t_g1{}, t_g2{}, t_sum{};
  double deviation = 0.0;  ///< |T_g1 T_g2 - T_{g1+g2}| / |T_{g1+g2}|
};

struct AdditivityReport {
  enum class Verdict { Additive, NotAdditive, Witness, NoWitnessFound };

  TranslationKind kind = TranslationKind::Manin;
  Verdict verdict = Verdict::NoWitnessFound;
  std::int64_t search_radius = 0;
  bool exhaustive = false;
  std::size_t triples_searched = 0;
  std::size_t triples_skipped_degenerate = 0;
  double max_deviation = 0.0;
  std::optional<AdditivityWitness> witness;  ///< triple with the largest deviation
};

std::string_view to_string(AdditivityReport::Verdict v) noexcept;

/// Manin: Additive iff every searched triple multiplies to 1e-10 (relative).
/// Modified: Witness when some triple with g1, g2 != 0 deviates by > 1e-6.
///
/// The ball is searched exhaustively when it has at most 250000 triples;
/// otherwise all axis points plus `random_triples` seeded samples are used.
AdditivityReport additivity_probe(const HermitianFormContext& ctx, const EmbeddingMap& emb, TranslationKind kind,
                                  std::int64_t search_radius, std::uint64_t seed = 0,
                                  std::size_t random_triples = 20000);

}  // namespace nctheta
