#include <cmath>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "steer/inference.hpp"
#include "steer/observables.hpp"
#include "test_support.hpp"

namespace steer {
namespace {

using testing::matrices_near;
using testing::Rng;

const Complex I{0.0, 1.0};

TEST(SpinHalf, MatricesAndSpectrum) {
  EXPECT_TRUE(matrices_near(spin_half(Axis::X).matrix(), ComplexMatrix{{0.0, 0.5}, {0.5, 0.0}}, 1e-15));
  const auto sz = spin_half(Axis::Z);
  const auto& ev = sz.outcomes();
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], 0.5, 1e-15);
  EXPECT_NEAR(ev[1], -0.5, 1e-15);
}

TEST(SpinHalf, CommutatorOfXAndZIsMinusY) {
  // [σx, σz] = -2i σy, so -i [Sx, Sz] = -Sy.
  const auto b3 = commutator_observable(spin_half(Axis::X), spin_half(Axis::Z));
  EXPECT_TRUE(matrices_near(b3.matrix(), Complex(-1.0) * spin_half(Axis::Y).matrix(), 1e-15));
}

TEST(QutritSet, MatchesReferenceOperators) {
  const auto s = qutrit_set();
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_EQ(s.b1.matrix(), ComplexMatrix::diagonal({1, -1, 0}));
  EXPECT_NEAR(s.b2.matrix()(0, 1).real(), h, 1e-16);
  EXPECT_NEAR(s.b3.matrix()(0, 1).imag(), -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.b3.matrix()(1, 0).imag(), std::sqrt(2.0), 1e-15);
}

TEST(QutritSet, Spectra) {
  const auto s = qutrit_set();
  const auto& e1 = s.b1.outcomes();
  ASSERT_EQ(e1.size(), 3u);
  EXPECT_NEAR(e1[0], 1.0, 1e-14);
  EXPECT_NEAR(e1[1], 0.0, 1e-14);
  EXPECT_NEAR(e1[2], -1.0, 1e-14);
  const auto& e2 = s.b2.outcomes();
  ASSERT_EQ(e2.size(), 3u);
  EXPECT_NEAR(e2[0], 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(e2[1], 0.0, 1e-14);
  EXPECT_NEAR(e2[2], -1.0 / std::sqrt(2.0), 1e-14);
}

TEST(QutritSet, CommutationRelation) {
  const auto s = qutrit_set();
  const auto comm = s.b1.matrix() * s.b2.matrix() - s.b2.matrix() * s.b1.matrix();
  EXPECT_TRUE(matrices_near(comm, I * s.b3.matrix(), 1e-12));
  EXPECT_TRUE(matrices_near(commutator_observable(s.b1, s.b2).matrix(), s.b3.matrix(), 1e-12));
}

TEST(Anticommutator, Examples) {
  const auto sx = spin_half(Axis::X), sz = spin_half(Axis::Z);
  EXPECT_TRUE(matrices_near(anticommutator_observable(sx, sz).matrix(), ComplexMatrix(2), 1e-15));
  const Observable id{"I", ComplexMatrix::identity(2)};
  EXPECT_TRUE(matrices_near(anticommutator_observable(sx, id).matrix(), Complex(2.0) * sx.matrix(), 1e-15));
  const auto s = qutrit_set();
  EXPECT_TRUE(matrices_near(anticommutator_observable(s.b1, s.b2).matrix(), ComplexMatrix(3), 1e-15));
}

TEST(Commutator, SelfCommutatorVanishes) {
  const auto b = qutrit_set().b2;
  EXPECT_TRUE(matrices_near(commutator_observable(b, b).matrix(), ComplexMatrix(3), 1e-15));
}

TEST(Difference, Examples) {
  const auto d = difference_observable(spin_half(Axis::X), spin_half(Axis::Z));
  ASSERT_EQ(d.outcomes().size(), 2u);
  EXPECT_NEAR(d.outcomes()[0], std::sqrt(2.0) / 2.0, 1e-14);
  EXPECT_NEAR(d.outcomes()[1], -std::sqrt(2.0) / 2.0, 1e-14);
  const auto z = difference_observable(spin_half(Axis::Y), spin_half(Axis::Y));
  EXPECT_TRUE(matrices_near(z.matrix(), ComplexMatrix(2), 1e-15));
}

TEST(DerivedObservables, HermitianForRandomInputs) {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 4);
    const Observable a{"a", testing::random_hermitian(n, rng)};
    const Observable b{"b", testing::random_hermitian(n, rng)};
    EXPECT_LT(hermiticity_residual(commutator_observable(a, b).matrix()), 1e-12);
    EXPECT_LT(hermiticity_residual(anticommutator_observable(a, b).matrix()), 1e-12);
    EXPECT_LT(hermiticity_residual(difference_observable(a, b).matrix()), 1e-12);
  }
}

TEST(DerivedObservables, DimensionMismatch) {
  const auto q = qutrit_set().b1;
  const auto s = spin_half(Axis::X);
  EXPECT_THROW(commutator_observable(q, s), DimensionError);
  EXPECT_THROW(anticommutator_observable(q, s), DimensionError);
  EXPECT_THROW(difference_observable(q, s), DimensionError);
}

TEST(Observable, RejectsNonHermitian) {
  EXPECT_THROW((Observable{"n", ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}}), NotHermitianError);
}

TEST(DefaultPairing, TransposeConvention) {
  EXPECT_EQ(default_pairing(spin_half(Axis::Z)).alice.matrix(), spin_half(Axis::Z).matrix());
  EXPECT_TRUE(matrices_near(default_pairing(spin_half(Axis::Y)).alice.matrix(),
                            Complex(-1.0) * spin_half(Axis::Y).matrix(), 1e-15));
}

TEST(DefaultPairing, CorrelationOnIsotropicQubit) {
  // Oracle: <Sx ⊗ Sx> on (1-p) I/4 + p |Ψ+><Ψ+| via explicit kron and trace.
  const auto pair = default_pairing(spin_half(Axis::X));
  for (double p : {0.0, 0.25, 0.5, 1.0}) {
    const auto rho = isotropic({2, p});
    const double oracle = expect(rho.matrix(), kron(pair.alice.matrix(), pair.bob.matrix())).real();
    EXPECT_NEAR(oracle, p / 4.0, 1e-14);
    EXPECT_NEAR(correlation_moments(rho, pair).ab, oracle, 1e-14);
  }
}

TEST(Observable, SpectralCacheIsSharedAndThreadSafe) {
  Rng rng(9);
  const Observable obs{"r", testing::random_hermitian(6, rng)};
  std::vector<const SpectralDecomposition*> seen(8);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < seen.size(); ++t) pool.emplace_back([&, t] { seen[t] = &obs.spectral(); });
  for (auto& th : pool) th.join();
  for (auto* s : seen) EXPECT_EQ(s, seen.front());
  const Observable copy = obs;
  EXPECT_EQ(&copy.spectral(), seen.front());
}

TEST(PairingRule, DifferenceSettingUsesAliceDifference) {
  const auto s = qutrit_set();
  const auto setup = PairingRule::transpose_rule().resolve(s.b1, s.b2);
  EXPECT_TRUE(matrices_near(setup.p0.alice.matrix(), transpose(s.b1.matrix() - s.b2.matrix()), 1e-15));
  EXPECT_TRUE(matrices_near(setup.p3.bob.matrix(), s.b3.matrix(), 1e-12));
  EXPECT_TRUE(matrices_near(setup.p3.alice.matrix(), transpose(s.b3.matrix()), 1e-12));

  const Observable a1{"a1", ComplexMatrix::diagonal({1, 0, -1})};
  const Observable a2{"a2", ComplexMatrix::diagonal({0, 1, 0})};
  const auto explicit_setup = PairingRule::explicit_rule(a1, a2).resolve(s.b1, s.b2);
  EXPECT_EQ(explicit_setup.p1.alice.matrix(), a1.matrix());
  EXPECT_EQ(explicit_setup.p0.alice.matrix(), a1.matrix() - a2.matrix());
  EXPECT_TRUE(matrices_near(explicit_setup.p4.alice.matrix(), ComplexMatrix(3), 1e-15));
}

}  // namespace
}  // namespace steer
