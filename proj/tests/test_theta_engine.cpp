#include "corpus.hpp"
#include "oracles.hpp"

#include "nctheta/errors.hpp"
#include "nctheta/theta_engine.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nctheta;
using namespace nctheta::testing;

namespace {

constexpr double kThetaI0 = 1.0864348112133080146;  // pi^{1/4} / Gamma(3/4)

cplx theta(cplx tau, cplx z) { return classical_theta({tau, z}); }

HermitianFormContext ctx_for(int p) { return HermitianFormContext(test_omega(p)); }

}  // namespace

TEST(ClassicalTheta, MatchesExtendedPrecision) {
  EXPECT_NEAR(theta(kI, 0.0).real(), kThetaI0, 1e-15);
  EXPECT_LT(std::abs(theta(kI, 0.0) - oracle::theta_mp(1.0, 0.0)), 1e-12);
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double im_tau = 0.5 + std::abs(u(rng));
    const cplx z(u(rng), 0.5 * u(rng));
    const cplx want = oracle::theta_mp(im_tau, z);
    EXPECT_LT(std::abs(theta(cplx(0, im_tau), z) - want), 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(ClassicalTheta, QuasiPeriodicity) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const cplx tau(0.3 * u(rng), 0.8 + 0.5 * std::abs(u(rng)));
    const cplx z(u(rng), 0.3 * u(rng));
    const cplx base = theta(tau, z);
    EXPECT_LT(std::abs(theta(tau, z + 1.0) - base), 1e-12 * std::abs(base));
    const cplx shifted = theta(tau, z + tau);
    const cplx want = std::exp(-kI * kPi * tau - 2.0 * kPi * kI * z) * base;
    EXPECT_LT(std::abs(shifted - want), 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(ClassicalTheta, HalfPeriodZero) {
  EXPECT_LT(std::abs(theta(kI, cplx(0.5, 0.5))), 1e-12);
  EXPECT_GT(std::abs(theta(kI, cplx(0.5, 0.0))), 0.1);
}

TEST(ClassicalTheta, RejectsLowerHalfPlane) {
  try {
    theta(cplx(0.0, -1.0), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadTau);
  }
  EXPECT_THROW(theta(cplx(1.0, 0.0), 0.0), Error);
}

TEST(ClassicalTheta, TruncationGrowsWithImaginaryZ) {
  EXPECT_LE(theta_truncation({kI, 0.0}), theta_truncation({kI, cplx(0, 3.0)}));
  EXPECT_LT(theta_truncation({kI, 0.0}), 10);
}

TEST(BFactor, MatchesCompletedSquare) {
  for (std::int64_t m = -6; m <= 6; ++m) {
    for (double r : {-0.7, -0.25, 0.0, 0.1, 0.3, 0.5, 0.9, 1.4}) {
      const cplx want = oracle::b_completed_square(r, m);
      const double scale = std::exp(-kPi * static_cast<double>(m * m) / 4.0);
      EXPECT_LT(std::abs(b_factor(r, m) - want), 1e-14 * scale) << "r=" << r << " m=" << m;
      EXPECT_LT(std::abs(b_factor_normalized(r, m) - want / scale), 1e-13);
    }
  }
}

TEST(BFactor, PeriodicityAndZeros) {
  for (std::int64_t m = -5; m <= 5; ++m) {
    for (double r : {-0.4, 0.1, 0.5, 0.8}) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      EXPECT_LT(std::abs(b_factor_normalized(r + 1.0, m) - sign * b_factor_normalized(r, m)), 1e-13);
    }
    const double at_half = std::abs(b_factor_normalized(0.5, m));
    if (m % 2 != 0) {
      EXPECT_LT(at_half, 1e-14) << m;
    } else {
      EXPECT_GT(at_half, 0.1) << m;
    }
  }
  EXPECT_NEAR(b_factor(0.0, 0).real(), kThetaI0, 1e-15);
}

TEST(BFactor, LatticeFactorIsProduct) {
  const auto emb = canonical_12();
  const auto h = lattice_point(emb, {1, 2, -1, 3});
  EXPECT_LT(std::abs(lattice_factor(h) - b_factor(h.r(0), h.m(0)) * b_factor(h.r(1), h.m(1))), 1e-16);
}

TEST(HermitianForm, IsHermitianAndPositive) {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> ui(-3, 3);
  for (const auto& emb : {canonical_10(), general_20(), canonical_12()}) {
    const auto ctx = ctx_for(emb.p());
    for (int t = 0; t < 20; ++t) {
      Index a(emb.d()), b(emb.d());
      for (auto& v : a) v = ui(rng);
      for (auto& v : b) v = ui(rng);
      const auto g = lattice_point(emb, a), h = lattice_point(emb, b);
      EXPECT_LT(std::abs(hermitian_form(ctx, g, h) - std::conj(hermitian_form(ctx, h, g))), 1e-12);
      EXPECT_GE(hermitian_form(ctx, g, g).real(), -1e-12);
      EXPECT_LT(std::abs(hermitian_form(ctx, g, g).imag()), 1e-12);
    }
  }
}

TEST(HermitianForm, ImaginaryPartIsTheCocyclePhase) {
  // On a vector-space lattice, alpha(g, h) = exp(pi i Im H(g, h)).
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> ui(-3, 3);
  for (const auto& emb : {canonical_10(), canonical_20(), general_20()}) {
    const auto ctx = ctx_for(emb.p());
    for (int t = 0; t < 20; ++t) {
      Index a(emb.d()), b(emb.d());
      for (auto& v : a) v = ui(rng);
      for (auto& v : b) v = ui(rng);
      const auto g = lattice_point(emb, a), h = lattice_point(emb, b);
      const cplx want = std::exp(cplx(0, kPi * hermitian_form(ctx, g, h).imag()));
      EXPECT_LT(std::abs(cocycle(g, h) - want), 1e-12);
    }
  }
}

TEST(GaussianIntegral, MatchesQuadrature) {
  CMatrix m1(1, 1);
  m1(0, 0) = cplx(1.3, -0.7);
  CVector v1(1);
  v1(0) = cplx(0.4, 1.1);
  EXPECT_LT(std::abs(gaussian_integral(m1, v1) - oracle::gaussian_quadrature(m1, v1, 10.0, 0.01)), 1e-10);

  CMatrix m2(2, 2);
  m2 << cplx(1.0, 0.5), cplx(0.2, -0.1), cplx(0.2, -0.1), cplx(0.8, 0.3);
  CVector v2(2);
  v2 << cplx(0.1, 0.5), cplx(-0.3, 0.2);
  const cplx want = oracle::gaussian_quadrature(m2, v2, 9.0, 0.03);
  EXPECT_LT(std::abs(gaussian_integral(m2, v2) - want), 1e-9 * std::abs(want));

  CMatrix bad(1, 1);
  bad(0, 0) = cplx(-1.0, 0.0);
  try {
    gaussian_integral(bad, CVector::Zero(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivergentIntegral);
  }
}

TEST(GaussianIntegral, EmptyDimensionIsOne) {
  EXPECT_EQ(gaussian_integral(CMatrix(0, 0), CVector(0)), cplx(1.0));
}

TEST(DiscreteGaussianSum, MatchesBruteForce) {
  for (double c : {-1.3, 0.0, 0.25, 2.5}) {
    for (cplx nu : {cplx(0.0), cplx(0.3), cplx(-0.2, 0.1)}) {
      cplx want = 0.0;
      for (int n = -60; n <= 60; ++n) {
        want += std::exp(-kPi * (n - c) * (n - c) + 2.0 * kPi * kI * nu * static_cast<double>(n));
      }
      EXPECT_LT(std::abs(discrete_gaussian_sum(c, nu) - want), 1e-14 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(InnerProduct, ClosedFormMatchesBruteQuadrature) {
  for (const auto& inst : corpus()) {
    const auto& emb = inst.emb;
    const auto f = GaussianVector::theta_vector(test_omega(emb.p()), emb.q());
    oracle::Fn F = [f](const RVector& s, const IVector& n) { return f(s, n); };
    const double step = emb.p() == 2 ? 0.05 : 0.01;
    int checked = 0;
    for (const auto& k : index_ball(emb.d(), 1)) {
      if (checked >= 20) break;
      const auto h = lattice_point(emb, k);
      oracle::Fn G = [&](const RVector& s, const IVector& n) { return oracle::pi_direct(h.w1, h.w2, h.m, h.r, F, s, n); };
      const cplx want = oracle::brute_inner(emb.p(), emb.q(), F, G, 7.0, step, 8);
      const cplx got = inner_product_closed(f, f, h);
      EXPECT_LT(std::abs(got - want), 1e-6 * std::abs(want)) << inst.name;
      ++checked;
    }
  }
}

TEST(InnerProduct, LibraryQuadratureAgrees) {
  const auto emb = canonical_12();
  const auto f = GaussianVector::theta_vector(test_omega(1), 2);
  const auto sf = sample(f, 7.0, 0.01, 8);
  for (const auto& k : index_ball(emb.d(), 1)) {
    const auto h = lattice_point(emb, k);
    const cplx want = inner_product_closed(f, f, h);
    EXPECT_LT(std::abs(inner_product_quadrature(sf, as_function(f), h) - want), 1e-6 * std::abs(want));
  }
}

TEST(InnerProduct, GridShiftOverload) {
  const auto emb = canonical_10();
  const auto f = GaussianVector::theta_vector(test_omega(1), 0);
  const auto sf = sample(f, 8.0, 0.01, 0);
  const auto h = lattice_point(emb, {2, 1});  // w1 = 1.0 is a whole number of steps
  EXPECT_LT(std::abs(inner_product_quadrature(sf, sf, h) - inner_product_closed(f, f, h)),
            1e-6 * std::abs(inner_product_closed(f, f, h)));
  const auto odd = sample(f, 7.5, 0.03, 0);
  try {
    inner_product_quadrature(odd, odd, h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(QuantumTheta, CoefficientsFollowClosedFormula) {
  for (const auto& inst : corpus()) {
    const auto& emb = inst.emb;
    const auto f = GaussianVector::theta_vector(test_omega(emb.p()), emb.q());
    const auto th = quantum_theta(emb, f, 2);
    const HermitianFormContext ctx(f.omega);
    for (const auto& [k, c] : th.coeffs()) {
      const auto h = lattice_point(emb, k);
      const cplx want = theta_coefficient_formula(ctx, h);
      // Near theta zeros the lattice sums cancel, so errors are measured against the Gaussian envelope.
      double envelope = -0.5 * kPi * hermitian_form(ctx, h, h).real();
      for (int j = 0; j < h.q(); ++j) envelope -= 0.25 * kPi * static_cast<double>(h.m(j) * h.m(j));
      EXPECT_LT(std::abs(c - want), 1e-12 * std::exp(envelope)) << inst.name;
    }
    const double zero = std::pow(kThetaI0, emb.q());
    EXPECT_NEAR(th.coeff(Index(emb.d(), 0)).real(), zero, 1e-12) << inst.name;
  }
}

TEST(QuantumTheta, RequiresStandardVector) {
  auto f = GaussianVector::theta_vector(test_omega(1), 0);
  f.ell(0) = 0.1;
  EXPECT_THROW(quantum_theta(canonical_10(), f, 2), Error);
  EXPECT_THROW(quantum_theta(canonical_10(), GaussianVector::theta_vector(test_omega(1), 0), 0), Error);
}

TEST(QuantumTheta, TailBoundDominatesActualTail) {
  for (const auto& emb : {canonical_10(), canonical_12(), general_11()}) {
    const auto f = GaussianVector::theta_vector(test_omega(emb.p()), emb.q());
    const auto big = quantum_theta(emb, f, 6);
    for (std::int64_t R : {1, 2, 3}) {
      double tail = 0.0;
      for (const auto& [k, c] : big.coeffs()) {
        if (inf_norm(k) > R) tail += std::abs(c);
      }
      const double bound = truncation_tail_bound(emb, f.omega, R);
      EXPECT_GE(bound, tail) << "R=" << R;
      EXPECT_LT(truncation_tail_bound(emb, f.omega, R + 1), bound);
    }
  }
}

TEST(QuantumTheta, CoefficientsDecayGaussianly) {
  const auto emb = canonical_20();
  const auto th = quantum_theta(emb, GaussianVector::theta_vector(test_omega(2), 0), 3);
  const auto fit = decay_fit(th);
  EXPECT_LT(fit.slope, -0.1);
  EXPECT_EQ(fit.points, th.size());
}
