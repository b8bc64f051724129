#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pulsega/spin_system.hpp"

namespace pulsega {

inline constexpr std::int32_t kCentidegPerTurn = 36000;

/// One row of the N x 4 encoding: hard pulse of width tau_us at a phase given
/// in hundredths of a degree, followed by a free-evolution delay.
struct PulseSegment {
  std::int64_t tau_us = 0;
  int sign_bit = 0;
  std::int32_t phase_centideg = 0;
  std::int64_t delay_us = 0;

  friend bool operator==(const PulseSegment&, const PulseSegment&) = default;
};

/// Chronologically ordered pulse/delay rows; segment 0 acts first.
struct PulseSequence {
  std::vector<PulseSegment> segments;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }
  friend bool operator==(const PulseSequence&, const PulseSequence&) = default;
};

/// Largest hard-pulse flip angle admitted in a sequence.
inline constexpr double kMaxFlipAngle = 1.5 * 3.14159265358979323846;

/// Longest pulse width (integer us) whose flip angle Omega * tau does not
/// exceed `max_flip` once rounded to the 1 us grid.
std::int64_t max_pulse_us(double rf_amplitude, double max_flip = kMaxFlipAngle);

/// Checks the field-level invariants of a segment (phase range, nonnegative
/// times, sign bit). Throws std::invalid_argument.
void validate_segment(const PulseSegment& seg);

/// Checks N >= 1, every segment, and the flip-angle bound for `sys`.
void validate_sequence(const PulseSequence& seq, const SpinSystem& sys);

/// Sign-resolved phase in centidegrees, in [0, 36000).
std::int32_t resolved_phase_centideg(const PulseSegment& seg);

/// Sign-resolved phase in radians, in [0, 2 pi).
double effective_phase(const PulseSegment& seg);

/// Sum of all pulse widths and delays, us.
std::int64_t total_duration(const PulseSequence& seq);

/// Square unitary matrix.
class Unitary {
 public:
  Unitary() = default;
  /// Throws std::invalid_argument if `m` is not square or U U^dagger deviates
  /// from the identity by more than `tol` in any entry.
  explicit Unitary(CMatrix m, double tol = 1e-9);

  static Unitary identity(Eigen::Index dim);
  /// Wraps without checking; for values unitary by construction.
  static Unitary trusted(CMatrix m);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// max |U U^dagger - I| over all entries.
  double unitarity_residual() const;

  /// `other` applied after `*this`: returns other * this.
  Unitary then(const Unitary& other) const;

 private:
  CMatrix m_;
};

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityOperator {
 public:
  DensityOperator() = default;
  explicit DensityOperator(CMatrix m);

  static DensityOperator basis_state(std::size_t index, std::size_t dim);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  CMatrix m_;
};

/// exp(-i H t) via the eigendecomposition of H; t in seconds.
Unitary matrix_exp(const HermitianOperator& h, double t);

/// Precomputed drift and rf operators for repeated propagator evaluation.
class PropagatorModel {
 public:
  explicit PropagatorModel(const SpinSystem& sys);

  const SpinSystem& system() const { return sys_; }

  /// Pulse factor followed by the delay factor; `rf_scale` multiplies Omega.
  CMatrix segment(const PulseSegment& seg, double rf_scale = 1.0) const;

  /// U_N ... U_2 U_1; `rf_scales` (if non-empty) gives a per-segment factor.
  CMatrix sequence(const PulseSequence& seq, std::span<const double> rf_scales = {}) const;

 private:
  SpinSystem sys_;
  Eigen::VectorXd drift_;
  CMatrix sx_;
  CMatrix sy_;
};

Unitary segment_propagator(const SpinSystem& sys, const PulseSegment& seg);
Unitary sequence_propagator(const SpinSystem& sys, const PulseSequence& seq);

/// |Tr(A B^dagger)| / sqrt(Tr(A A^dagger) Tr(B B^dagger)).
double gate_fidelity(const CMatrix& u_tgt, const CMatrix& u_opt);
double gate_fidelity(const Unitary& u_tgt, const Unitary& u_opt);

DensityOperator apply_to_state(const Unitary& u, const DensityOperator& rho);

/// Uhlmann-Jozsa fidelity Tr sqrt(sqrt(rho_th) rho_exp sqrt(rho_th)).
double state_fidelity(const DensityOperator& rho_th, const DensityOperator& rho_exp);

/// sqrt(<psi|rho|psi>) for a pure reference state given as a unit vector.
double pure_state_fidelity(const Eigen::VectorXcd& psi, const DensityOperator& rho);

/// ((1 - epsilon) / 2^n) I + epsilon |label><label| for a bitstring label.
DensityOperator pseudopure_state(std::string_view label, double epsilon);

}  // namespace pulsega
