#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pulsega/gates.hpp"
#include "pulsega/robustness.hpp"
#include "support.hpp"

using namespace pulsega;
using namespace pulsega::testing;

namespace {

constexpr double kOmega = 120.88e3;
constexpr double kDeg = std::numbers::pi / 180.0;

// Overlap of two rotations about the same axis differing by `d` radians.
double same_axis_fidelity(double d) { return std::abs(std::cos(d / 2)); }

}  // namespace

TEST(AxisRange, LatticeIncludesZero) {
  EXPECT_EQ((AxisRange{-1, 1, 0.5}.values()), (std::vector<double>{-1, -0.5, 0, 0.5, 1}));
  EXPECT_EQ((AxisRange{-1, 1, 0.75}.values()), (std::vector<double>{-1, -0.25, 0, 0.5}));
  EXPECT_EQ((AxisRange{0.1, 0.3, 0.1}.values().size()), 3u);
  EXPECT_EQ((AxisRange{2, 2, 1}.values()), (std::vector<double>{2}));
  const auto v = AxisRange{-14, 14, 0.1}.values();
  EXPECT_EQ(v.size(), 281u);
  EXPECT_EQ(std::count(v.begin(), v.end(), 0.0), 1);
  EXPECT_THROW((AxisRange{0, 1, 0}.values()), std::invalid_argument);
  EXPECT_THROW((AxisRange{1, 0, 1}.values()), std::invalid_argument);
}

TEST(Errors, OffsetAndFlipPerturbations) {
  SpinSystem sys = make_uncoupled_system(2, kOmega);
  sys.chemical_shifts = {100, 200};
  const SpinSystem off = apply_offset_error(sys, 50);
  EXPECT_EQ(off.chemical_shifts, (std::vector<double>{150, 250}));
  EXPECT_EQ(off.frame_freqs, sys.frame_freqs);
  EXPECT_DOUBLE_EQ(apply_flip_error(sys, 9).rf_amplitude, kOmega * 1.1);
  EXPECT_THROW(apply_flip_error(sys, -90), std::invalid_argument);
}

TEST(Perturbed, SinglePulseFlipErrorClosedForm) {
  const SpinSystem sys = make_uncoupled_system(1, kOmega);
  for (std::int64_t tau : {5, 13, 26, 39}) {
    const PulseSequence seq{{{tau, 0, 9000, 0}}};
    const Unitary nominal = sequence_propagator(sys, seq);
    const double theta = kOmega * tau * 1e-6;
    for (double d : {-14.0, -3.5, 0.0, 2.0, 12.5}) {
      const double mult = perturbed_fidelity(sys, seq, nominal, d, 0.0, FlipErrorModel::Multiplicative);
      EXPECT_NEAR(mult, same_axis_fidelity(theta * d / 90.0), 1e-9);
      const double add = perturbed_fidelity(sys, seq, nominal, d, 0.0, FlipErrorModel::Additive);
      EXPECT_NEAR(add, same_axis_fidelity(d * kDeg), 1e-9);
    }
  }
}

TEST(Perturbed, SinglePulseOffsetClosedForm) {
  const SpinSystem sys = make_uncoupled_system(1, kOmega);
  const PulseSequence seq{{{13, 0, 0, 0}}};
  const Unitary nominal = sequence_propagator(sys, seq);
  const double t = 13e-6, dnu = 3000.0;
  // perturbed rotation vector (Omega, 0, -2 pi dnu)
  const double w = 2 * std::numbers::pi * dnu;
  const double norm = std::hypot(kOmega, w);
  const double theta = kOmega * t;
  // Tr(R_x(theta) R(n, phi)^dagger)/2
  const Complex tr = std::cos(theta / 2) * std::cos(norm * t / 2) +
                     std::sin(theta / 2) * std::sin(norm * t / 2) * kOmega / norm;
  EXPECT_NEAR(perturbed_fidelity(sys, seq, nominal, 0.0, dnu), std::abs(tr), 1e-9);
}

TEST(Scan, OriginEqualsNominalFidelity) {
  Stream rng(21, 0, 0, StreamTag::Test);
  const SpinSystem sys = random_system(rng, 3);
  const PulseSequence seq = random_sequence(sys, rng, 4, 200);
  const Unitary target = pauli_word(std::string(sys.n_spins, 'Y'));
  const FidelityGrid g = scan(sys, seq, target, {-2, 2, 1}, {-100, 100, 50});
  EXPECT_EQ(g.at(0.0, 0.0), gate_fidelity(target, sequence_propagator(sys, seq)));
  EXPECT_EQ(g.values.rows(), 5);
  EXPECT_EQ(g.values.cols(), 5);
  EXPECT_THROW(g.at(0.5, 0.0), std::out_of_range);
}

TEST(Scan, ThreadCountDoesNotChangeValues) {
  Stream rng(22, 0, 0, StreamTag::Test);
  const SpinSystem sys = random_system(rng, 3);
  const PulseSequence seq = random_sequence(sys, rng, 4, 200);
  const Unitary target = Unitary::identity(static_cast<Eigen::Index>(sys.dim()));
  const FidelityGrid a = scan(sys, seq, target, {-3, 3, 1}, {-40, 40, 20}, FlipErrorModel::Additive, 1);
  const FidelityGrid b = scan(sys, seq, target, {-3, 3, 1}, {-40, 40, 20}, FlipErrorModel::Additive, 4);
  EXPECT_EQ(a.values, b.values);
}

TEST(Scan, RejectsBadInput) {
  const SpinSystem sys = make_uncoupled_system(1, kOmega);
  const Unitary target = Unitary::identity(2);
  EXPECT_THROW(scan(sys, {}, target, {0, 1, 1}, {0, 1, 1}), std::invalid_argument);
  EXPECT_THROW(scan(sys, {{{1, 0, 0, 0}}}, target, {-95, 0, 5}, {0, 1, 1}), std::invalid_argument);
}
