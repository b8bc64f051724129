#include <gtest/gtest.h>

#include <numbers>

#include "pulsega/spin_system.hpp"
#include "support.hpp"

using namespace pulsega;
using namespace pulsega::testing;

TEST(PauliEmbed, MatchesTensorProductForAllSlots) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t k = 0; k < n; ++k) {
      for (auto axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
        EXPECT_EQ(max_abs(pauli_embed(axis, k, n) - kron_pauli(axis, k, n)), 0.0) << "n=" << n << " k=" << k;
      }
    }
  }
}

TEST(PauliEmbed, QubitZeroIsMostSignificant) {
  const CMatrix z0 = pauli_embed(PauliAxis::Z, 0, 3);
  for (int b = 0; b < 8; ++b) EXPECT_EQ(z0(b, b).real(), b < 4 ? 1.0 : -1.0);
  const CMatrix x2 = pauli_embed(PauliAxis::X, 2, 3);
  EXPECT_EQ(x2(1, 0), Complex(1, 0));
  EXPECT_EQ(x2(4, 0), Complex(0, 0));
}

TEST(PauliEmbed, RejectsBadIndex) {
  EXPECT_THROW(pauli_embed(PauliAxis::X, 3, 3), std::out_of_range);
  EXPECT_THROW(pauli_embed(PauliAxis::X, 0, 0), std::out_of_range);
}

TEST(PauliEmbed, AnticommutationOnSameSpin) {
  const CMatrix x = pauli_embed(PauliAxis::X, 1, 3);
  const CMatrix y = pauli_embed(PauliAxis::Y, 1, 3);
  const CMatrix z = pauli_embed(PauliAxis::Z, 1, 3);
  EXPECT_LT(max_abs(x * y - Complex(0, 1) * z), 1e-15);
  EXPECT_LT(max_abs(x * y + y * x), 1e-15);
}

TEST(Drift, DiagonalMatchesOperatorSum) {
  Stream rng(7, 0, 0, StreamTag::Test);
  for (int trial = 0; trial < 20; ++trial) {
    const SpinSystem sys = random_system(rng, 4);
    const auto n = sys.n_spins;
    const auto dim = static_cast<Eigen::Index>(sys.dim());
    CMatrix h = CMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
      h += -std::numbers::pi * (sys.chemical_shifts[i] - sys.frame_freqs[i]) * kron_pauli(PauliAxis::Z, i, n);
      for (std::size_t j = i + 1; j < n; ++j) {
        h += std::numbers::pi / 2 * sys.couplings(i, j) * kron_pauli(PauliAxis::Z, i, n) * kron_pauli(PauliAxis::Z, j, n);
      }
    }
    EXPECT_LT(max_abs(drift_hamiltonian(sys).matrix() - h), 1e-9);
  }
}

TEST(Drift, SingleSpinOffset) {
  SpinSystem sys = make_uncoupled_system(1, 1e5);
  sys.chemical_shifts = {1000.0};
  const auto d = drift_diagonal(sys);
  EXPECT_NEAR(d(0), -std::numbers::pi * 1000.0, 1e-9);
  EXPECT_NEAR(d(1), std::numbers::pi * 1000.0, 1e-9);
}

TEST(Drift, FrameFrequencyCancelsShift) {
  SpinSystem sys = make_uncoupled_system(2, 1e5);
  sys.chemical_shifts = {500.0, -300.0};
  sys.frame_freqs = {500.0, -300.0};
  EXPECT_EQ(drift_diagonal(sys).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RfHamiltonian, PhaseZeroIsHalfOmegaSigmaX) {
  const SpinSystem sys = make_uncoupled_system(2, 2.0);
  const CMatrix expected = kron_pauli(PauliAxis::X, 0, 2) + kron_pauli(PauliAxis::X, 1, 2);
  EXPECT_LT(max_abs(rf_hamiltonian(sys, 0.0).matrix() - expected), 1e-15);
  const CMatrix expected_y = kron_pauli(PauliAxis::Y, 0, 2) + kron_pauli(PauliAxis::Y, 1, 2);
  EXPECT_LT(max_abs(rf_hamiltonian(sys, std::numbers::pi / 2).matrix() - expected_y), 1e-15);
}

TEST(SpinSystemValidate, RejectsBrokenInvariants) {
  SpinSystem ok = make_uncoupled_system(2, 1e5);
  EXPECT_NO_THROW(ok.validate());

  SpinSystem s = ok;
  s.chemical_shifts.pop_back();
  EXPECT_THROW(s.validate(), std::invalid_argument);

  s = ok;
  s.couplings(0, 1) = 5.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);

  s = ok;
  s.couplings(1, 1) = 1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);

  s = ok;
  s.rf_amplitude = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);

  EXPECT_THROW(make_uncoupled_system(7, 1e5).validate(), std::invalid_argument);
  EXPECT_NO_THROW(make_uncoupled_system(7, 1e5).validate(7));
  EXPECT_THROW(SpinSystem{}.validate(), std::invalid_argument);
}

TEST(HermitianOperator, RejectsNonHermitian) {
  CMatrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, 1), 1;
  EXPECT_THROW(HermitianOperator{m}, std::invalid_argument);
  EXPECT_THROW(HermitianOperator{CMatrix::Zero(2, 3)}, std::invalid_argument);
  m(1, 0) = Complex(0, -1);
  EXPECT_NO_THROW(HermitianOperator{m});
}
