#include "nctheta/manin_verify.hpp"

#include <cfloat>
#include <cmath>
#include <map>
#include <random>

namespace nctheta {

namespace {

std::string index_str(const Index& k) {
  std::string s = "(";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + ")";
}

bool is_degenerate(const LatticePoint& g, cplx value) {
  for (int j = 0; j < g.q(); ++j) {
    if (std::abs(b_factor_normalized(g.r(j), g.m(j))) < kDegeneracyTol) return true;
  }
  return std::abs(value) < DBL_MIN;
}

void check_pq(const HermitianFormContext& ctx, const EmbeddingMap& emb, const LatticePoint& g) {
  if (ctx.p() != emb.p() || g.p() != emb.p() || g.q() != emb.q()) {
    throw Error(ErrorCode::DimensionMismatch, "context, embedding and point differ in (p,q)");
  }
}

Index add(const Index& a, const Index& b) {
  Index out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

}  // namespace

std::string_view to_string(TranslationKind k) noexcept {
  return k == TranslationKind::Manin ? "manin" : "modified";
}

std::string_view to_string(AdditivityReport::Verdict v) noexcept {
  switch (v) {
    case AdditivityReport::Verdict::Additive: return "additive";
    case AdditivityReport::Verdict::NotAdditive: return "not_additive";
    case AdditivityReport::Verdict::Witness: return "witness";
    case AdditivityReport::Verdict::NoWitnessFound: return "no_witness_found";
  }
  return "unknown";
}

TranslationFactor translation_factor(const HermitianFormContext& ctx, const EmbeddingMap& emb,
                                     const LatticePoint& g, TranslationKind kind) {
  check_pq(ctx, emb, g);
  TranslationFactor out;
  out.g = g;
  out.kind = kind;
  const double gauss = std::exp(-0.5 * kPi * hermitian_form(ctx, g, g).real());
  if (kind == TranslationKind::Manin) {
    out.value = gauss;
    return out;
  }
  out.value = lattice_factor(g) * gauss;
  out.degenerate = is_degenerate(g, out.value);
  return out;
}

cplx translation_multiplier(const HermitianFormContext& ctx, const EmbeddingMap& emb, const LatticePoint& g,
                            const LatticePoint& h, TranslationKind kind) {
  check_pq(ctx, emb, h);
  if (kind == TranslationKind::Manin) return std::exp(-kPi * hermitian_form(ctx, g, h));
  const auto cg = translation_factor(ctx, emb, g, kind);
  const auto ch = translation_factor(ctx, emb, h, kind);
  std::vector<Index> bad;
  if (cg.degenerate) bad.push_back(g.index);
  if (ch.degenerate) bad.push_back(h.index);
  if (!bad.empty()) {
    throw DegenerateTranslationError(bad, "vanishing C^ at " + index_str(bad.front()));
  }
  const auto cgh = translation_factor(ctx, emb, g + h, kind);
  return cgh.value / (cg.value * ch.value * cocycle(g, h));
}

const TranslationFactor& FactorTable::at(const Index& k) {
  auto it = cache_.find(k);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(k, translation_factor(ctx_, emb_, lattice_point(emb_, k), kind_)).first->second;
}

QuantumElement translate(const HermitianFormContext& ctx, const EmbeddingMap& emb, const LatticePoint& g,
                         const QuantumElement& x, TranslationKind kind) {
  FactorTable table(ctx, emb, kind);
  return translate(table, g, x);
}

QuantumElement translate(FactorTable& table, const LatticePoint& g, const QuantumElement& x) {
  const auto& ctx = table.context();
  const auto& emb = table.embedding();
  check_pq(ctx, emb, g);
  QuantumElement out(x.embedding(), x.radius());
  out.set_drop_threshold(0.0);
  if (table.kind() == TranslationKind::Manin) {
    for (const auto& [k, c] : x.coeffs()) {
      out.set(k, c * std::exp(-kPi * hermitian_form(ctx, g, table.at(k).g)));
    }
    out.set_drop_threshold(x.drop_threshold());
    return out;
  }

  // Scan for vanishing factors before dividing by any of them.
  std::vector<Index> bad;
  if (table.at(g.index).degenerate) bad.push_back(g.index);
  for (const auto& [k, c] : x.coeffs()) {
    if (table.at(k).degenerate) bad.push_back(k);
  }
  if (!bad.empty()) {
    throw DegenerateTranslationError(bad, std::to_string(bad.size()) + " degenerate factor(s), first at " +
                                              index_str(bad.front()));
  }
  const cplx cg = table.at(g.index).value;
  for (const auto& [k, c] : x.coeffs()) {
    const auto& h = table.at(k);
    out.set(k, c * table.at(add(g.index, k)).value / (cg * h.value * cocycle(g, h.g)));
  }
  out.set_drop_threshold(x.drop_threshold());
  return out;
}

FunctionalEquationReport verify_functional_equation(const HermitianFormContext& ctx, const EmbeddingMap& emb,
                                                    const QuantumElement& theta, const LatticePoint& g,
                                                    TranslationKind kind) {
  FactorTable table(ctx, emb, kind);
  return verify_functional_equation(table, theta, g);
}

FunctionalEquationReport verify_functional_equation(FactorTable& table, const QuantumElement& theta,
                                                    const LatticePoint& g) {
  const auto& emb = table.embedding();
  check_pq(table.context(), emb, g);
  const std::int64_t radius = theta.radius();
  const std::int64_t gnorm = inf_norm(g.index);
  if (2 * gnorm > radius) {
    throw Error(ErrorCode::InvalidArgument, "|index(g)|_inf must be at most R/2");
  }
  const auto& cg = table.at(g.index);
  if (cg.degenerate) throw DegenerateTranslationError({g.index}, "vanishing C^ at " + index_str(g.index));

  const QuantumElement moved = translate(table, g, theta);
  const QuantumElement lhs = qel_multiply(QuantumElement::basis(emb, g.index, cg.value), moved);

  FunctionalEquationReport rep;
  rep.g = g.index;
  rep.kind = table.kind();
  rep.interior_radius = radius - gnorm;
  for (const auto& k : index_ball(emb.d(), rep.interior_radius)) {
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs.coeff(k) - theta.coeff(k)));
    ++rep.compared;
  }
  rep.passed = rep.max_residual < rep.threshold;
  return rep;
}

CocycleReport verify_cocycle_consistency(const HermitianFormContext& ctx, const EmbeddingMap& emb,
                                         TranslationKind kind,
                                         const std::vector<std::pair<LatticePoint, LatticePoint>>& sample) {
  CocycleReport rep;
  rep.kind = kind;
  rep.pairs = sample.size();
  if (kind == TranslationKind::Manin) {
    rep.threshold = 1e-10;
    for (const auto& [g, h] : sample) {
      const cplx lhs = translation_factor(ctx, emb, g + h, kind).value /
                       (translation_factor(ctx, emb, g, kind).value * translation_factor(ctx, emb, h, kind).value);
      const cplx rhs = translation_multiplier(ctx, emb, g, h, kind) * cocycle(g, h);
      const cplx ratio = lhs / rhs;
      rep.max_modulus_residual = std::max(rep.max_modulus_residual, std::abs(std::abs(ratio) - 1.0));
      rep.max_phase_residual = std::max(rep.max_phase_residual, std::abs(std::arg(ratio)));
    }
    rep.passed = rep.max_modulus_residual < rep.threshold;
    return rep;
  }
  rep.threshold = 1e-12;
  for (const auto& [g, h] : sample) {
    const auto cg = translation_factor(ctx, emb, g, kind);
    const auto ch = translation_factor(ctx, emb, h, kind);
    if (cg.degenerate || ch.degenerate) {
      std::vector<Index> bad;
      if (cg.degenerate) bad.push_back(g.index);
      if (ch.degenerate) bad.push_back(h.index);
      throw DegenerateTranslationError(bad, "vanishing C^ at " + index_str(bad.front()));
    }
    const cplx ratio = translation_factor(ctx, emb, g + h, kind).value / (cg.value * ch.value * cocycle(g, h));
    const cplx stored = translate(ctx, emb, g, QuantumElement::basis(emb, h.index), kind).coeff(h.index);
    const double scale = std::max(std::abs(ratio), DBL_MIN);
    rep.max_definitional_residual = std::max(rep.max_definitional_residual, std::abs(ratio - stored) / scale);
  }
  rep.passed = rep.max_definitional_residual < rep.threshold;
  return rep;
}

AdditivityReport additivity_probe(const HermitianFormContext& ctx, const EmbeddingMap& emb, TranslationKind kind,
                                  std::int64_t search_radius, std::uint64_t seed, std::size_t random_triples) {
  const int d = emb.d();
  AdditivityReport rep;
  rep.kind = kind;
  rep.search_radius = search_radius;

  const auto ball = index_ball(d, search_radius);
  const double triple_count = std::pow(static_cast<double>(ball.size()), 3);
  rep.exhaustive = triple_count <= 250000.0;

  FactorTable cache(ctx, emb, kind);
  std::map<Index, LatticePoint> points;
  auto point = [&](const Index& k) -> const LatticePoint& {
    auto it = points.find(k);
    if (it != points.end()) return it->second;
    return points.emplace(k, lattice_point(emb, k)).first->second;
  };

  auto multiplier = [&](const Index& g, const Index& h) -> std::optional<cplx> {
    if (kind == TranslationKind::Manin) return std::exp(-kPi * hermitian_form(ctx, point(g), point(h)));
    const auto& cg = cache.at(g);
    const auto& ch = cache.at(h);
    if (cg.degenerate || ch.degenerate) return std::nullopt;
    return cache.at(add(g, h)).value / (cg.value * ch.value * cocycle(point(g), point(h)));
  };

  auto consider = [&](const Index& g1, const Index& g2, const Index& h) {
    if (kind == TranslationKind::Modified) {
      const bool zero1 = inf_norm(g1) == 0, zero2 = inf_norm(g2) == 0;
      if (zero1 || zero2) return;
    }
    const auto t1 = multiplier(g1, h);
    const auto t2 = multiplier(g2, h);
    const auto t12 = multiplier(add(g1, g2), h);
    if (!t1 || !t2 || !t12) {
      ++rep.triples_skipped_degenerate;
      return;
    }
    ++rep.triples_searched;
    const double scale = std::max(std::abs(*t12), DBL_MIN);
    const double dev = std::abs(*t1 * *t2 - *t12) / scale;
    if (!rep.witness || dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.witness = AdditivityWitness{g1, g2, h, *t1, *t2, *t12, dev};
    }
  };

  if (rep.exhaustive) {
    for (const auto& g1 : ball) {
      for (const auto& g2 : ball) {
        for (const auto& h : ball) consider(g1, g2, h);
      }
    }
  } else {
    std::vector<Index> axis;
    axis.push_back(Index(d, 0));
    for (int i = 0; i < d; ++i) {
      for (std::int64_t j = -search_radius; j <= search_radius; ++j) {
        if (j == 0) continue;
        Index k(d, 0);
        k[i] = j;
        axis.push_back(k);
      }
    }
    for (const auto& g1 : axis) {
      for (const auto& g2 : axis) {
        for (const auto& h : axis) consider(g1, g2, h);
      }
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    for (std::size_t t = 0; t < random_triples; ++t) {
      const auto& g1 = ball[pick(rng)];
      const auto& g2 = ball[pick(rng)];
      const auto& h = ball[pick(rng)];
      consider(g1, g2, h);
    }
  }

  if (kind == TranslationKind::Manin) {
    rep.verdict = rep.max_deviation < 1e-10 ? AdditivityReport::Verdict::Additive
                                            : AdditivityReport::Verdict::NotAdditive;
  } else {
    rep.verdict = rep.max_deviation > 1e-6 ? AdditivityReport::Verdict::Witness
                                           : AdditivityReport::Verdict::NoWitnessFound;
  }
  return rep;
}

}  // namespace nctheta
