#include "corpus.hpp"
#include "oracles.hpp"

#include "nctheta/errors.hpp"
#include "nctheta/heisenberg.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace nctheta;
using namespace nctheta::testing;

namespace {

GaussianVector random_gaussian(std::mt19937_64& rng, int p, int q) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  GaussianVector f = GaussianVector::theta_vector(test_omega(p), q);
  for (int k = 0; k < p; ++k) f.ell(k) = cplx(u(rng), u(rng));
  for (int l = 0; l < q; ++l) {
    f.n0(l) = static_cast<std::int64_t>(std::lround(2 * u(rng)));
    f.mu(l) = u(rng);
  }
  f.c0 = cplx(1.0 + u(rng), u(rng));
  return f;
}

void random_point(std::mt19937_64& rng, int p, int q, RVector& s, IVector& n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ui(-2, 2);
  s.resize(p);
  n.resize(q);
  for (int k = 0; k < p; ++k) s(k) = u(rng);
  for (int l = 0; l < q; ++l) n(l) = ui(rng);
}

oracle::Fn as_fn(const GaussianVector& f) {
  return [f](const RVector& s, const IVector& n) { return f(s, n); };
}

}  // namespace

TEST(GaussianVector, ValidatesShape) {
  GaussianVector f = GaussianVector::theta_vector(test_omega(2), 1);
  f.omega(0, 1) += 0.1;
  EXPECT_THROW(f.validate(), Error);
  CMatrix bad = test_omega(1);
  bad(0, 0) = cplx(0.0, -1.0);
  EXPECT_THROW(GaussianVector::theta_vector(bad, 0), Error);
}

TEST(GaussianVector, EvaluatesDefiningFormula) {
  const auto f = GaussianVector::theta_vector(test_omega(1), 1);
  RVector s(1);
  s << 0.3;
  IVector n(1);
  n << 2;
  const cplx want = std::exp(cplx(0, kPi) * f.omega(0, 0) * 0.09 - 0.5 * kPi * 4.0);
  EXPECT_LT(std::abs(f(s, n) - want), 1e-15);
}

TEST(ApplyPi, ClosedFormMatchesDirectOperator) {
  std::mt19937_64 rng(10);
  for (const auto& inst : corpus()) {
    const auto& emb = inst.emb;
    const auto f = random_gaussian(rng, emb.p(), emb.q());
    for (const auto& k : index_ball(emb.d(), 1)) {
      const auto h = lattice_point(emb, k);
      const auto g = apply_pi(h, f);
      EXPECT_NO_THROW(g.validate());
      for (int t = 0; t < 5; ++t) {
        RVector s;
        IVector n;
        random_point(rng, emb.p(), emb.q(), s, n);
        const cplx want = oracle::pi_direct(h.w1, h.w2, h.m, h.r, as_fn(f), s, n);
        EXPECT_LT(std::abs(g(s, n) - want), 1e-12 * std::max(1.0, std::abs(want))) << inst.name;
        EXPECT_LT(std::abs(pi_pointwise(h, as_function(f))(s, n) - want), 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST(ApplyPi, CompositionLawUsesCocycle) {
  // pi_x pi_y = alpha(x, y) pi_{x+y}
  std::mt19937_64 rng(11);
  for (const auto& inst : corpus()) {
    const auto& emb = inst.emb;
    const auto f = random_gaussian(rng, emb.p(), emb.q());
    for (int t = 0; t < 10; ++t) {
      Index a(emb.d()), b(emb.d());
      std::uniform_int_distribution<int> ui(-2, 2);
      for (auto& v : a) v = ui(rng);
      for (auto& v : b) v = ui(rng);
      const auto x = lattice_point(emb, a);
      const auto y = lattice_point(emb, b);
      const auto lhs = apply_pi(x, apply_pi(y, f));
      const auto rhs = apply_pi(x + y, f);
      RVector s;
      IVector n;
      random_point(rng, emb.p(), emb.q(), s, n);
      const cplx want = cocycle(x, y) * rhs(s, n);
      EXPECT_LT(std::abs(lhs(s, n) - want), 1e-10 * std::max(1.0, std::abs(want))) << inst.name;
    }
  }
}

TEST(Generators, CommuteUpToInducedTheta) {
  std::mt19937_64 rng(12);
  for (const auto& emb : {canonical_10(), canonical_20(), canonical_12(), canonical_02(), general_11()}) {
    const RMatrix theta = induced_theta(emb);
    const auto f = random_gaussian(rng, emb.p(), emb.q());
    for (int i = 0; i < emb.d(); ++i) {
      for (int j = 0; j < emb.d(); ++j) {
        const auto uij = apply_generator(emb, i, apply_generator(emb, j, f));
        const auto uji = apply_generator(emb, j, apply_generator(emb, i, f));
        for (int t = 0; t < 5; ++t) {
          RVector s;
          IVector n;
          random_point(rng, emb.p(), emb.q(), s, n);
          const cplx want = std::exp(cplx(0, 2 * kPi * theta(i, j))) * uji(s, n);
          EXPECT_LT(std::abs(uij(s, n) - want), 1e-9 * std::max(1.0, std::abs(want)));
        }
      }
    }
  }
  EXPECT_THROW(apply_generator(canonical_10(), 2, GaussianVector::theta_vector(test_omega(1), 0)), Error);
}

TEST(Connection, MatrixInvertsXTilde) {
  for (const auto& inst : corpus()) {
    const RMatrix b = connection_matrix(inst.emb);
    EXPECT_LT(max_abs(b * inst.emb.x_tilde() - RMatrix::Identity(inst.emb.d(), inst.emb.d())), 1e-12);
  }
}

TEST(Connection, CommutatorWithGenerators) {
  // [nabla_i, U_j] f = 2 pi i delta_ij U_j f, both in closed form and by finite differences.
  std::mt19937_64 rng(13);
  for (const auto& inst : corpus()) {
    const auto& emb = inst.emb;
    const auto f = random_gaussian(rng, emb.p(), emb.q());
    for (int i = 0; i < emb.d(); ++i) {
      for (int j = 0; j < emb.d(); ++j) {
        const auto uf = apply_generator(emb, j, f);
        const auto nabla_uf = apply_connection(emb, i, uf);
        const auto nabla_f = apply_connection(emb, i, f);
        const ModuleFunction u_nabla_f = pi_pointwise(lattice_point(emb, [&] {
                                                        Index e(emb.d(), 0);
                                                        e[j] = 1;
                                                        return e;
                                                      }()),
                                                      [nabla_f](const RVector& s, const IVector& n) {
                                                        return nabla_f(s, n);
                                                      });
        const double delta = i == j ? 1.0 : 0.0;
        for (int t = 0; t < 5; ++t) {
          RVector s;
          IVector n;
          random_point(rng, emb.p(), emb.q(), s, n);
          const cplx want = 2.0 * kPi * kI * delta * uf(s, n);
          const cplx got = nabla_uf(s, n) - u_nabla_f(s, n);
          const double scale = std::max(1.0, std::abs(uf(s, n)));
          EXPECT_LT(std::abs(got - want), 1e-10 * scale) << inst.name << " i=" << i << " j=" << j;

          const cplx fd = apply_connection_fd(emb, i, as_function(uf), s, n) -
                          pi_pointwise(lattice_point(emb, [&] {
                                         Index e(emb.d(), 0);
                                         e[j] = 1;
                                         return e;
                                       }()),
                                       [&](const RVector& s2, const IVector& n2) {
                                         return apply_connection_fd(emb, i, as_function(f), s2, n2);
                                       })(s, n);
          EXPECT_LT(std::abs(fd - want), 1e-6 * scale) << inst.name << " i=" << i << " j=" << j;
        }
      }
    }
  }
}

TEST(Connection, ClosedFormMatchesFiniteDifference) {
  std::mt19937_64 rng(14);
  for (const auto& inst : corpus()) {
    const auto& emb = inst.emb;
    const auto f = random_gaussian(rng, emb.p(), emb.q());
    for (int j = 0; j < emb.d(); ++j) {
      const auto nf = apply_connection(emb, j, f);
      RVector s;
      IVector n;
      random_point(rng, emb.p(), emb.q(), s, n);
      const cplx fd = apply_connection_fd(emb, j, as_function(f), s, n);
      EXPECT_LT(std::abs(nf(s, n) - fd), 1e-6 * std::max(1.0, std::abs(fd))) << inst.name;
    }
  }
}

TEST(SampledVector, LayoutLocateAndBudget) {
  const auto f = GaussianVector::theta_vector(test_omega(1), 1);
  const auto sv = sample(f, 1.0, 0.5, 1);
  EXPECT_EQ(sv.points_per_s_axis(), 5);
  EXPECT_EQ(sv.points_per_n_axis(), 3);
  ASSERT_EQ(sv.values().size(), 15u);
  RVector s;
  IVector n;
  sv.coordinates(7, s, n);
  EXPECT_DOUBLE_EQ(s(0), 0.0);
  EXPECT_EQ(n(0), 0);
  EXPECT_EQ(sv.values()[7], f(s, n));
  EXPECT_EQ(sv.locate({2}, n), 7u);
  EXPECT_EQ(sv.locate({5}, n), SampledVector::npos);
  EXPECT_THROW(sample(f, 10.0, 1e-3, 5, 1000), Error);
  EXPECT_THROW(SampledVector(1, 0, 1.0, 0.3, 0), Error);

  std::ostringstream os;
  sv.write_csv(os);
  EXPECT_EQ(os.str().substr(0, 12), "s1,n1,re,im\n");
}
